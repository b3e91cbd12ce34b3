"""Roboterpolicies, PPO-Verluste, Rollouts und Trainingsschleife."""

from .baselines import BASELINES, OrcaRobot, SocialForceRobot, StraightLineRobot, ZeroRobot
from .buffer import Batch, Episode, RolloutBuffer, Transition
from .policy import ActionRecord, Critic, HamiltonianPolicy, RobotPolicy, load_policy, save_policy
from .ppo import clipped_surrogate, critic_loss, gae, ppo_actor_loss
from .rollout import collect_episodes, episode_seeds, run_episode
from .train import MetricsLog, TrainResult, UpdateMetrics, train

__all__ = [
    "BASELINES",
    "ActionRecord",
    "Batch",
    "Critic",
    "Episode",
    "HamiltonianPolicy",
    "MetricsLog",
    "OrcaRobot",
    "RobotPolicy",
    "RolloutBuffer",
    "SocialForceRobot",
    "StraightLineRobot",
    "TrainResult",
    "Transition",
    "UpdateMetrics",
    "ZeroRobot",
    "clipped_surrogate",
    "collect_episodes",
    "critic_loss",
    "episode_seeds",
    "gae",
    "load_policy",
    "ppo_actor_loss",
    "run_episode",
    "save_policy",
    "train",
]
