import numpy as np
import pytest

from hamnav.config import load_settings
from hamnav.encoder import PREFIX, ObservationWindow
from hamnav.env.crowd import CrowdSim, SocialReward
from hamnav.errors import CheckpointFormatError, PolicyMismatchError
from hamnav.nn.checkpoint import save_checkpoint
from hamnav.rl.buffer import RolloutBuffer
from hamnav.rl.policy import Critic, HamiltonianPolicy, critic_features, critic_width, load_policy, observation_window, save_policy
from hamnav.rl.ppo import critic_loss, ppo_actor_loss
from hamnav.rl.rollout import run_episode

from test.conftest import SMALL


def history(settings, seed=0, steps=1):
    sim = CrowdSim(settings.env)
    state, _ = sim.reset(seed)
    states = [state]
    for _ in range(steps - 1):
        _, state = sim.step(state, np.array([0.0, 0.5]))
        states.append(state)
    return states


def test_observation_window_pads_with_first_frame(small_settings):
    states = history(small_settings)

    window = observation_window(states, 3)

    assert window.entries.shape == (3, 3, 8)
    assert np.array_equal(window.entries[:, 0], window.entries[:, 2])
    assert np.allclose(window.entries[0, -1], states[0].robot.full())
    assert np.allclose(window.entries[1, -1, 5:], 0.0)


def test_eval_action_is_deterministic_and_bounded(small_policy, small_settings):
    states = history(small_settings, steps=3)

    first = small_policy.act(states, np.random.default_rng(4), "eval")
    second = small_policy.act(states, np.random.default_rng(4), "eval")

    assert np.array_equal(first.action, second.action)
    assert np.linalg.norm(first.action) <= small_settings.env.robot_v_pref + 1e-9
    assert first.raw is None


def test_train_action_records_log_probability(small_policy, small_settings):
    states = history(small_settings, steps=2)

    record = small_policy.act(states, np.random.default_rng(5), "train")
    mean = small_policy.act(states, np.random.default_rng(5), "eval").action
    std = np.exp(small_settings.policy.init_log_std)

    expected = -0.5 * np.sum(((record.raw - mean) / std) ** 2) - 2 * np.log(std) - np.log(2 * np.pi)
    assert record.log_prob == pytest.approx(expected)
    assert np.linalg.norm(record.action) <= small_settings.env.robot_v_pref + 1e-9
    assert record.window is not None and record.condition.shape == (5,)


def test_ratio_is_one_under_collecting_snapshot(small_policy, small_settings):
    sim = CrowdSim(small_settings.env, SocialReward(small_settings.reward))
    snapshot = small_policy.clone()
    episode = run_episode(sim, snapshot, seed=3, mode="train")
    batch = RolloutBuffer([episode]).to_batch(lambda s: np.zeros(len(s)), 0.99, 0.95)

    _, stats = ppo_actor_loss(batch, small_policy, 0.2)

    assert len(batch) == len(episode)
    assert stats.mean_ratio == pytest.approx(1.0, abs=1e-6)
    assert stats.max_abs_log_ratio < 1e-6
    assert stats.clip_fraction == 0.0


def test_actor_loss_has_parameter_gradients(small_policy, small_settings):
    sim = CrowdSim(small_settings.env, SocialReward(small_settings.reward))
    episode = run_episode(sim, small_policy.clone(), seed=1, mode="train")
    batch = RolloutBuffer([episode]).to_batch(lambda s: np.zeros(len(s)), 0.99, 0.95)

    loss, _ = ppo_actor_loss(batch, small_policy, 0.2)
    small_policy.store.backward(loss)

    assert small_policy.store.grad_norm() > 0.0
    assert np.abs(small_policy.store.grad("policy.log_std")).sum() > 0.0
    encoder_grads = [np.abs(small_policy.store.grad(name)).sum() for name in small_policy.store if name.startswith(f"{PREFIX}.")]
    assert sum(encoder_grads) > 0.0


@pytest.mark.parametrize("variant", ["ph_only", "diffusion_only"])
def test_ablation_variants_act(variant):
    settings = load_settings(**{**SMALL, "policy": {**SMALL["policy"], "variant": variant}})
    policy = HamiltonianPolicy(settings)
    states = history(settings, steps=2)

    record = policy.act(states, np.random.default_rng(0), "eval")
    window = observation_window(states, policy.window_steps)
    a_ph, _ = policy.ph_action(ObservationWindow(window.entries[None], window.present[None]))

    assert record.action.shape == (2,)
    assert np.linalg.norm(record.action) <= settings.env.robot_v_pref + 1e-9
    if variant == "diffusion_only":
        assert np.allclose(a_ph.data, 0.0)
    else:
        expected = a_ph.data[0]
        norm = np.linalg.norm(expected)
        if norm > settings.env.robot_v_pref:
            expected = expected * settings.env.robot_v_pref / norm
        assert np.allclose(record.action, expected)


def test_mismatched_scenario_is_rejected(small_policy, small_settings):
    other = small_settings.env.model_copy(update={"dt": 0.1})

    with pytest.raises(PolicyMismatchError):
        small_policy.check_compatible(other)
    small_policy.check_compatible(small_settings.env)


def test_checkpoint_round_trip_preserves_actions(small_policy, small_settings, tmp_path):
    critic = Critic(small_settings)
    states = history(small_settings, steps=2)

    path = save_policy(tmp_path / "policy.ckpt", small_policy, critic, update=3)
    loaded, loaded_critic, meta = load_policy(path)

    assert meta["kind"] == "hamnav-policy"
    assert meta["update"] == 3
    assert meta["config"]["encoder"]["d_model"] == 8
    a = small_policy.act(states, np.random.default_rng(9)).action
    b = loaded.act(states, np.random.default_rng(9)).action
    assert np.allclose(a, b)
    assert np.allclose(critic.values(states), loaded_critic.values(states))


def test_foreign_checkpoint_is_rejected(tmp_path):
    path = save_checkpoint(tmp_path / "other.ckpt", {"w": np.zeros(2)}, {"kind": "something-else"})

    with pytest.raises(CheckpointFormatError):
        load_policy(path)


def test_critic_features_and_values(small_settings):
    critic = Critic(small_settings)
    states = history(small_settings, steps=3)

    features = critic_features(states[0], 2)
    values = critic.values(states)

    assert features.shape == (critic_width(2),)
    assert np.allclose(features[:2], states[0].robot.g - states[0].robot.p)
    assert values.shape == (3,)
    assert critic.values([]).shape == (0,)


def test_critic_loss_is_mean_squared_error(small_settings, small_policy):
    critic = Critic(small_settings)
    sim = CrowdSim(small_settings.env, SocialReward(small_settings.reward))
    episode = run_episode(sim, small_policy.clone(), seed=2, mode="train")
    batch = RolloutBuffer([episode]).to_batch(critic.values, 0.99, 0.95)

    loss = critic_loss(batch, critic)
    critic.store.backward(loss)

    expected = np.mean((critic.values(batch.states) - batch.returns) ** 2)
    assert float(loss.data) == pytest.approx(expected)
    assert critic.store.grad_norm() > 0.0
