import importlib
import logging

import numpy as np
import pytest

from hamnav.config import load_settings
from hamnav.errors import NonFiniteRatioError, TrainingDivergedError
from hamnav.rl.policy import load_policy
from hamnav.rl.train import CHECKPOINT_NAME, METRICS_NAME, MetricsLog, UpdateMetrics, train

from test.conftest import SMALL


def tiny(**train):
    return load_settings(**{**SMALL, "train": {**SMALL["train"], **train}})


def test_zero_episodes_do_nothing(tmp_path):
    result = train(tiny(total_episodes=0), out_dir=tmp_path)

    assert result.metrics == []
    assert result.checkpoint is None
    assert not (tmp_path / CHECKPOINT_NAME).exists()


def test_single_update_writes_metrics_and_checkpoint(tmp_path):
    result = train(tiny(total_episodes=2), out_dir=tmp_path)

    assert len(result.metrics) == 1
    row = result.metrics[0]
    assert row.update == 1 and row.episodes == 2
    assert 0.0 <= row.success_rate <= 1.0
    assert result.checkpoint == tmp_path / CHECKPOINT_NAME
    lines = (tmp_path / METRICS_NAME).read_text(encoding="utf-8").splitlines()
    assert lines[0].split("\t") == MetricsLog.columns
    assert len(lines) == 2
    _, _, meta = load_policy(result.checkpoint)
    assert meta["update"] == 1


def test_training_is_reproducible_with_one_worker():
    first = train(tiny(total_episodes=2)).policy.store.state_dict()
    second = train(tiny(total_episodes=2)).policy.store.state_dict()

    assert first.keys() == second.keys()
    assert all(np.array_equal(first[k], second[k]) for k in first)


def test_update_moves_parameters():
    settings = tiny(total_episodes=2)
    result = train(settings)
    fresh = type(result.policy)(settings).store.state_dict()

    changed = [k for k, v in result.policy.store.state_dict().items() if not np.array_equal(v, fresh[k])]
    assert changed


def test_rejected_batches_end_in_divergence(tmp_path, monkeypatch, caplog):
    def broken(*args, **kwargs):
        raise NonFiniteRatioError("kaputt", {"batch_size": 0})

    monkeypatch.setattr(importlib.import_module("hamnav.rl.train"), "ppo_actor_loss", broken)

    with caplog.at_level(logging.WARNING, logger="hamnav.rl.train"):
        with pytest.raises(TrainingDivergedError):
            train(tiny(total_episodes=2), out_dir=tmp_path)

    assert "Minibatch verworfen" in caplog.text
    assert (tmp_path / CHECKPOINT_NAME).exists()
    _, _, meta = load_policy(tmp_path / CHECKPOINT_NAME)
    assert meta["update"] == 0


def test_metrics_log_in_memory():
    log = MetricsLog()
    row = UpdateMetrics(1, 2, 10, -1.5, 0.5, 0.0, 0.1, 0.2, 1.0, 0.0, 0)

    log.append(row)

    assert log.rows == [row]
    assert "rejected_batches" in MetricsLog.columns
