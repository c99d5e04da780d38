# Copyright 2026 The rdlearn Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
import itertools
import math

import numpy as np
import pytest

import rdlearn


def all_states(n):
    return np.array(list(itertools.product([0, 1], repeat=n)), dtype=np.uint8)[:, ::-1].copy()


def test_free_energy_matches_hidden_sum():
    p = rdlearn.RbmParams.random_normal(4, 3, 0.7, seed=5)
    x = np.array([1, 0, 1, 1], dtype=np.uint8)
    w, b, c = p.weights, p.visible_bias, p.hidden_bias
    z = sum(math.exp(b @ x + c @ h + x @ w @ h) for h in all_states(3))
    assert rdlearn.free_energy(p, x) == pytest.approx(-math.log(z), rel=1e-12)
    dw, db, dc = rdlearn.free_energy_grad(p, x)
    assert np.allclose(db, -x.astype(float))
    assert dw.shape == (4, 3) and dc.shape == (3,)


def test_exact_distribution_normalized():
    p = rdlearn.RbmParams.random_normal(5, 2, 1.0, seed=1)
    q = np.array(rdlearn.exact_model_distribution(p))
    assert q.sum() == pytest.approx(1.0)
    f = rdlearn.free_energies(p, all_states(5))
    assert np.allclose(q, np.exp(-f - rdlearn.exact_log_partition(p)))


def test_ising_energy_and_delta():
    m = rdlearn.TargetModel.ising(3, 0.5)
    up = np.ones(9, dtype=np.uint8)
    assert m.raw_energy(up) == -18.0
    assert m.energy(up) == -9.0
    flipped = up.copy()
    flipped[4] = 0
    assert m.energy_delta(up, 4) == pytest.approx(m.energy(flipped) - m.energy(up))


def test_pt_train_sample_evaluate():
    m = rdlearn.TargetModel.ising(3, 0.4)
    d = rdlearn.generate_dataset(m, n_replicas=3, beta_min=0.2, total_mcs=5000,
                                 burn_in_records=50, train_size=256, val_size=64, seed=3)
    train, val = d["train"], d["val"]
    assert train.shape == (256, 9) and val.shape == (64, 9)
    assert set(np.unique(train)) <= {0, 1}
    params, r0, metrics = rdlearn.train(train, val, m, objective="rd", epochs=20,
                                        minibatch=64, seed=1, learning_rate=0.01)
    assert params.nx == 9 and params.nh == 9
    assert metrics[-1][0] == 20
    assert metrics[-1][2] < r0
    samples = rdlearn.generate_samples(params, train, steps=10, seed=2, count=128)
    assert samples.shape == (128, 9)
    w = rdlearn.wasserstein(m.energies(samples), m.energies(train))
    assert w >= 0.0


def test_objectives_return_gradients():
    m = rdlearn.TargetModel.sk(6, 1.0, seed=4)
    p = rdlearn.RbmParams.random_normal(6, 4, 0.3, seed=2)
    rng = np.random.default_rng(0)
    data = rng.integers(0, 2, size=(8, 6), dtype=np.uint8)
    chains = rng.integers(0, 2, size=(8, 6), dtype=np.uint8)
    loss_rd, (dw, db, dc) = rdlearn.objective("rd", p, m, data, chains)
    loss_sym, _ = rdlearn.objective("rd", p, m, chains, data)
    assert loss_rd == pytest.approx(loss_sym)
    assert dw.shape == (6, 4)
    fwd, _ = rdlearn.objective("fwd", p, m, data, data)
    assert fwd == 0.0
    with pytest.raises(rdlearn.InvalidArgument):
        rdlearn.objective("nope", p, m, data, chains)


def test_divergences_identity():
    p = [0.2, 0.3, 0.5]
    q = [0.4, 0.4, 0.2]
    d = rdlearn.exact_divergences(p, q)
    assert d["ratio_div"] == pytest.approx(2 * d["kl_fwd"] * d["kl_rev"] + d["kl2_fwd"] + d["kl2_rev"])
    assert math.exp(-math.sqrt(d["ratio_div"])) <= d["mh_acceptance_expectation"]


def test_gset_parse_errors():
    nodes, edges = rdlearn.parse_gset("3 2\n1 2 1\n2 3 -1\n")
    assert nodes == 3 and edges == [(0, 1, 1.0), (1, 2, -1.0)]
    with pytest.raises(rdlearn.ParseError):
        rdlearn.parse_gset("3 2\n1 2 1\n1 4 1\n")


def test_dataset_and_params_files(tmp_path):
    rng = np.random.default_rng(1)
    xs = rng.integers(0, 2, size=(10, 13), dtype=np.uint8)
    rdlearn.save_dataset(tmp_path / "x.rdd", xs)
    assert np.array_equal(rdlearn.load_dataset(tmp_path / "x.rdd"), xs)
    p = rdlearn.RbmParams.random_normal(3, 2, 1.0, seed=9)
    rdlearn.save_params(tmp_path / "p.rdp", p)
    assert rdlearn.load_params(tmp_path / "p.rdp") == p
    with pytest.raises(rdlearn.DimensionError):
        rdlearn.free_energy(p, np.zeros(4, dtype=np.uint8))


def test_run_experiment(tmp_path):
    cfg = """{"preset": "ising-144", "scale": "desk", "seeds": [1],
              "model": {"side": 3},
              "tempering": {"total_mcs": 3000, "burn_in_records": 50, "train_size": 200, "val_size": 50},
              "training": {"epochs": 4, "minibatch": 50, "eval_interval": 2, "checkpoint_interval": 0},
              "sampling": {"count": 100, "steps": 5},
              "evaluation": {"hamming_k": 40, "pca_points": 30}}"""
    report = rdlearn.run_experiment(cfg, tmp_path / "out")
    assert "| wasserstein |" in report
    assert (tmp_path / "out" / "eval" / "summary.csv").exists()
