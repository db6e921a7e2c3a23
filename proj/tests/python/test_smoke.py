# Copyright 2026 The QUSUM Lab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import numpy as np
import pytest

import qusum

SIGMA = np.diag([0.9, 0.1]).astype(complex)
RHO = np.diag([0.5, 0.5]).astype(complex)
BASIS = [np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)]
KL = 0.9 * math.log(1.8) + 0.1 * math.log(0.2)


def test_thermal_entropy():
    sigma, rho = qusum.state_pair("thermal:nbar=1", "thermal:nbar=0.5")
    r = qusum.relative_entropy(sigma, rho)
    assert r["support_ok"]
    assert abs(r["value"] - 0.117783) < 1e-6


def test_support_violation_is_infinite():
    sigma, rho = qusum.state_pair("coherent:re=1,im=0", "fock:n=0")
    assert math.isinf(qusum.relative_entropy(sigma, rho)["value"])


def test_kl_and_measured():
    assert abs(qusum.kl_divergence([0.9, 0.1], [0.5, 0.5]) - KL) < 1e-15
    assert abs(qusum.measured_relative_entropy(SIGMA, RHO, BASIS) - KL) < 1e-12
    assert qusum.induced_distribution(BASIS, SIGMA) == pytest.approx([0.9, 0.1])


def test_errors_carry_a_kind():
    with pytest.raises(qusum.QusumError) as info:
        qusum.kl_divergence([0.5, 0.5], [0.2, 0.3, 0.5])
    assert info.value.kind == "LengthMismatch"
    with pytest.raises(qusum.QusumError):
        qusum.state("banana")


def test_optimizer_commuting_pair():
    r = qusum.optimize_measurement(SIGMA, RHO, restarts=3, seed=1)
    assert abs(r["best_value"] - KL) < 1e-6
    assert r["gap"] < 1e-6
    elements = r["povm"]
    assert np.allclose(sum(elements), np.eye(2), atol=1e-9)
    back = qusum.povm_from_json(qusum.povm_to_json(elements))
    assert all(np.allclose(a, b) for a, b in zip(back, elements))


def test_cusum_path():
    path, stop = qusum.cusum_path([1.0, -2.0, 3.0], 3.0)
    assert path == [1.0, 0.0, 3.0]
    assert stop == 3
    assert qusum.cusum_path([0.0] * 10, 1e-9)[1] is None


def test_small_tradeoff_is_deterministic():
    kwargs = dict(seed=5, thresholds=[1.5, 3.0, 4.5, 6.0, 7.5], n_trials_delay=500, n_trials_fa=300)
    a = qusum.tradeoff(SIGMA, RHO, BASIS, **kwargs)
    b = qusum.tradeoff(SIGMA, RHO, BASIS, jobs=2, **kwargs)
    assert a["csv"] == b["csv"]
    assert a["csv"].startswith("h,tfa_mean,tfa_stderr,delay_mean,delay_stderr,n_trials,censored")
    assert abs(a["theory_slope"] - 1.0 / KL) < 1e-9
    assert a["slope"] > 0.9 * a["quantum_slope"]


def test_verification_suites():
    passed, worst = qusum.verify_lemma3(20, 3)
    assert passed and worst < 1e-9
    assert qusum.verify_dpi(20, 4)
    values, full, ok = qusum.compression_table(np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex),
                                               np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex))
    assert ok and len(values) == 3 and abs(values[-1] - full) < 1e-8


def test_cli_in_process():
    code, out, _ = qusum.run_cli(["--json", "-", "entropy", "--sigma", "thermal:nbar=1",
                                  "--rho", "thermal:nbar=0.5"])
    assert code == 0
    json.loads(out)
    assert qusum.run_cli(["entropy", "--sigma", "nope"])[0] == 2
