class IcnError(Exception):
    pass


class ParseError(IcnError, ValueError):
    pass


class ValidationError(IcnError, ValueError):
    pass


class UnknownRouter(IcnError, KeyError):
    def __init__(self, router, n=None):
        self.router = router
        msg = f"unknown router {router!r}"
        if n is not None:
            msg += f" (valid ids are 1..{n})"
        super().__init__(msg)

    def __str__(self):
        return self.args[0]


class UnknownContent(IcnError, KeyError):
    def __str__(self):
        return self.args[0]


class NotAdjacent(IcnError):
    pass


class HopBudgetExhausted(IcnError):
    pass


class NoCsHit(IcnError):
    pass


class BrokenPitChain(IcnError, RuntimeError):
    """PIT state disagrees with the interest trace. Always a simulator bug."""


class InvalidAction(IcnError, ValueError):
    pass


class EpisodeFinished(IcnError):
    pass


class NoValidAction(IcnError, RuntimeError):
    pass


class NonPositiveArgument(IcnError, ValueError):
    pass


class ConfigError(IcnError, ValueError):
    pass
