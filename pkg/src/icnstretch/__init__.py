"""Q-learning stretch reduction for information-centric networks."""

from icnstretch.errors import (
    BrokenPitChain,
    ConfigError,
    EpisodeFinished,
    HopBudgetExhausted,
    IcnError,
    InvalidAction,
    NoCsHit,
    NotAdjacent,
    NoValidAction,
    NonPositiveArgument,
    ParseError,
    UnknownContent,
    UnknownRouter,
    ValidationError,
)
from icnstretch.topology import (
    PathTrace,
    Topology,
    build_default_topology,
    load_topology,
    neighbors,
    shortest_hops,
)
from icnstretch.icn import DataPacket, InterestPacket, Network, RouterNode
from icnstretch.mdp import (
    RewardConfig,
    StretchEnv,
    Transition,
    reward_from_stretch,
    stretch_from_reward,
)
from icnstretch.qlearning import (
    INF_STRETCH,
    Hyperparams,
    LoopFailure,
    QTable,
    greedy_path,
    greedy_policy,
    has_converged,
    select_action,
    update,
)
from icnstretch.experiment import (
    EpisodeRecord,
    ExperimentConfig,
    RunSummary,
    emit_report,
    run_training,
    sweep,
)

__version__ = "0.1.0"
