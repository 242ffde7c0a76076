import warnings

import numpy as np
import pytest

from kerrcubic import dynamics as dyn
from kerrcubic import experiments as ex
from kerrcubic import fock as fk
from kerrcubic import states as st
from kerrcubic.dynamics import GateConfig


class TestFitPowerLaw:
    def test_exact_cubic(self):
        xs = np.linspace(1.0, 5.0, 7)
        fit = ex.fit_power_law(list(zip(xs, 7.0 * xs**3)))
        assert abs(fit.exponent - 3.0) < 1e-12
        assert abs(fit.prefactor - 7.0) < 1e-10
        assert fit.r_squared > 1 - 1e-12

    def test_perturbed_inverse_quartic(self):
        xs = np.linspace(1.0, 8.0, 10)
        wiggle = 1.0 + 0.01 * np.where(np.arange(10) % 2 == 0, 1.0, -1.0)
        fit = ex.fit_power_law(list(zip(xs, xs**-4.0 * wiggle)))
        assert abs(fit.exponent + 4.0) < 0.05

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            ex.fit_power_law([(1.0, 1.0), (2.0, 16.0)])

    def test_nonpositive_data(self):
        with pytest.raises(ValueError):
            ex.fit_power_law([(1.0, 1.0), (2.0, -1.0), (3.0, 2.0)])


class TestOptimizeAlpha:
    def setup_method(self):
        self.n = 128
        self.lam = fk.lambda_from_db(10.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            self.psi = st.gkp_state(st.GkpParams("z+", 0.5), self.n)
        self.cfg = GateConfig(lam=self.lam, alpha=10.0, gamma=0.1, n_fock=self.n)

    def test_degenerate_bracket(self):
        opt = ex.optimize_alpha(self.cfg, (40.0, 40.0), self.psi)
        assert opt.alpha == 40.0
        assert opt.evaluations == 1

    def test_finds_local_minimum(self):
        opt = ex.optimize_alpha(self.cfg, (20.0, 180.0), self.psi)
        assert 40.0 < opt.alpha < 90.0
        e_up = dyn.cubic_gate(
            GateConfig(lam=self.lam, alpha=opt.alpha * 1.05, gamma=0.1, n_fock=self.n),
            self.psi,
        ).error
        e_dn = dyn.cubic_gate(
            GateConfig(lam=self.lam, alpha=opt.alpha * 0.95, gamma=0.1, n_fock=self.n),
            self.psi,
        ).error
        assert e_up >= opt.error - 1e-9
        assert e_dn >= opt.error - 1e-9

    def test_non_unimodal_bracket_falls_back(self):
        # bracket entirely on the decreasing branch: coarse argmin sits on the
        # boundary, triggering the dense-scan fallback
        with pytest.warns(UserWarning, match="unimodal"):
            opt = ex.optimize_alpha(self.cfg, (18.0, 50.0), self.psi)
        assert not opt.unimodal
        assert 18.0 <= opt.alpha <= 50.0

    def test_bad_bracket(self):
        with pytest.raises(ValueError):
            ex.optimize_alpha(self.cfg, (-1.0, 5.0), self.psi)


class TestSweeps:
    def test_single_point_reduces_to_cubic_gate(self):
        base = GateConfig(lam=1.0, alpha=30.0, gamma=0.1, n_fock=96)
        spec = ex.SweepSpec(base=base, param="lam_db", values=(10.0,),
                            input_state="squeezed:0.5", alpha_mode="fixed")
        rows = ex.lambda_sweep(spec)
        psi = st.squeezed_vacuum(0.5, 96)
        direct = dyn.cubic_gate(
            GateConfig(lam=fk.lambda_from_db(10.0), alpha=30.0, gamma=0.1, n_fock=96), psi
        )
        assert len(rows) == 1
        assert rows[0]["ok"]
        assert rows[0]["error"] == direct.error

    def test_row_failure_recorded_not_raised(self):
        base = GateConfig(lam=1.0, alpha=30.0, gamma=0.1, n_fock=96)
        spec = ex.SweepSpec(base=base, param="chi_over_kappa", values=(1e-3, 0.0),
                            input_state="squeezed:0.5")
        rows = ex.run_sweep(spec)
        assert rows[0]["ok"]
        assert not rows[1]["ok"]
        assert rows[1]["message"]

    def test_parallel_matches_serial(self):
        base = GateConfig(lam=1.0, alpha=30.0, gamma=0.1, n_fock=64)
        kw = dict(base=base, param="lam_db", values=(8.0, 10.0, 12.0),
                  input_state="squeezed:0.5", alpha_mode="cube", alpha_coeff=1.85)
        serial = ex.run_sweep(ex.SweepSpec(workers=1, **kw))
        parallel = ex.run_sweep(ex.SweepSpec(workers=2, **kw))
        assert serial == parallel

    def test_rerun_is_identical(self):
        base = GateConfig(lam=1.0, alpha=30.0, gamma=0.1, n_fock=64)
        spec = ex.SweepSpec(base=base, param="lam_db", values=(9.0, 11.0),
                            input_state="squeezed:0.5", alpha_mode="cube")
        assert ex.run_sweep(spec) == ex.run_sweep(spec)

    def test_spec_validation(self):
        base = GateConfig(lam=1.0, alpha=30.0, gamma=0.1)
        with pytest.raises(ValueError):
            ex.SweepSpec(base=base, param="nonsense", values=(1.0,))
        with pytest.raises(ValueError):
            ex.SweepSpec(base=base, param="lam_db", values=())
        with pytest.raises(ValueError):
            ex.SweepSpec(base=base, param="lam_db", values=(1.0,), alpha_mode="x")


class TestNoiseSweep:
    def test_rows_and_symmetrized_excess(self):
        base = GateConfig(lam=1.0, alpha=30.0, gamma=0.1, n_fock=96)
        spec = ex.SweepSpec(base=base, param="dtheta", values=(1e-4,),
                            input_state="squeezed:0.5", alpha_mode="cube")
        rows = ex.noise_sweep(spec, (10.0,))
        assert len(rows) == 1
        r = rows[0]
        assert r["ok"]
        assert r["excess"] == 0.5 * (r["error_plus"] + r["error_minus"]) - r["error_int"]
        assert r["excess"] > 0

    def test_rejects_non_noise_param(self):
        base = GateConfig(lam=1.0, alpha=30.0, gamma=0.1)
        spec = ex.SweepSpec(base=base, param="lam_db", values=(10.0,))
        with pytest.raises(ValueError):
            ex.noise_sweep(spec, (10.0,))

    def test_flags_large_error(self):
        base = GateConfig(lam=1.0, alpha=30.0, gamma=0.1, n_fock=96)
        spec = ex.SweepSpec(base=base, param="dtheta", values=(0.3,),
                            input_state="squeezed:0.5", alpha_mode="cube")
        rows = ex.noise_sweep(spec, (12.5,))
        assert "0.5" in rows[0]["message"]


class TestGenerateCubicState:
    def test_lossless_high_squeezing(self):
        cfg = GateConfig.make(lam_db=15.0, alpha=1.85 * (10**0.75) ** 3, gamma=0.1,
                              n_fock=128)
        res = ex.generate_cubic_state(cfg)
        assert res.fidelity > 0.999
        assert res.fidelity >= res.raw_fidelity - 1e-12
        assert res.wigner.min() < -1e-3  # non-classicality
        assert res.nlq_variance > 0

    def test_correction_can_be_disabled(self):
        cfg = GateConfig.make(lam_db=10.0, alpha=60.0, gamma=0.1, n_fock=96)
        res = ex.generate_cubic_state(cfg, gaussian_correction=False)
        assert res.fidelity == res.raw_fidelity
        assert np.all(res.correction == 0.0)

    def test_fidelity_improves_toward_one_with_squeezing(self):
        fids = []
        for db in (7.5, 12.5):
            lam = fk.lambda_from_db(db)
            cfg = GateConfig(lam=lam, alpha=1.85 * lam**3, gamma=0.1, n_fock=128)
            fids.append(ex.generate_cubic_state(cfg).fidelity)
        assert fids[1] > fids[0]
