import json
import math

import mpmath as mp
import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gammaln

from heatflat.gevrey import (
    DecayFit,
    GevreyParams,
    Signal,
    bump_gevrey,
    fourier_decay_fit,
    gaussian_signal,
    gevrey_cutoff,
    gevrey_norm_time,
    product_signal,
    two_sided_bump,
    weight_Mn,
    weight_seq,
    weighted_fourier_norm,
)

P2 = GevreyParams(2.0, 0.5, 0.0)


class TestWeightMn:
    def test_M0_unit(self):
        assert abs(weight_Mn(GevreyParams(2, 1, 0), 0).value() - 1.0) < 1e-15

    def test_M1_highprec_oracle(self):
        # (s=2, R=1, gamma=0, n=1): 2! * 2^(-1/4)
        with mp.workdps(40):
            want = float(mp.gamma(3) * mp.mpf(2) ** mp.mpf("-0.25"))
        got = weight_Mn(GevreyParams(2, 1, 0), 1).value()
        assert abs(got - want) < 1e-14
        assert abs(got - 1.6817928305074290) < 1e-12

    def test_index_bridge(self):
        # M_k at (2, 1/sqrt2, -1/2) equals (2k)! 2^k (1+k)^{3/4} exactly
        p = GevreyParams(2.0, 1.0 / math.sqrt(2.0), -0.5)
        for k in range(0, 51):
            lhs = weight_Mn(p, k).log_mag
            rhs = gammaln(2 * k + 1) + k * math.log(2.0) + 0.75 * math.log1p(k)
            assert abs(lhs - rhs) <= 1e-12 * max(abs(rhs), 1.0)

    def test_log_convexity_gamma0(self):
        logM = weight_seq(GevreyParams(2.0, 1.0, 0.0), 102).logM
        for n in range(2, 101):
            assert logM[n + 1] + logM[n - 1] >= 2 * logM[n] - 1e-9


class TestSignal:
    def test_uniform_grid_required(self):
        g = np.array([0.0, 0.1, 0.3])
        with pytest.raises(ValueError):
            Signal(g, np.zeros(3))

    def test_deriv_consistency_checked(self):
        g = np.linspace(0, 1, 11)
        with pytest.raises(ValueError):
            Signal(g, np.zeros(11), deriv=lambda n, t: np.ones_like(np.asarray(t)))

    def test_csv_json_round_trip(self, tmp_path):
        sig = gaussian_signal(0.5, 1.0, npts=257)
        pcsv = tmp_path / "sig.csv"
        pjson = tmp_path / "sig.json"
        sig.to_csv(pcsv)
        sig.to_json(pjson)
        rows = pcsv.read_text().strip().split("\n")
        assert rows[0] == "t,value"
        assert len(rows) == 258
        desc = json.loads(pjson.read_text())
        assert desc["family"] == "gaussian"
        assert desc["params"]["sigma"] == 1.0

    def test_sum_signal(self):
        a = gaussian_signal(0.0, 1.0, grid=np.linspace(-10, 10, 513))
        b = gaussian_signal(1.0, 0.8, grid=np.linspace(-10, 10, 513))
        s = a + b
        t = np.array([0.3, 1.2])
        assert np.allclose(s.deriv(2, t), a.deriv(2, t) + b.deriv(2, t), rtol=1e-13)


class TestGevreyNormTime:
    def test_zero_signal(self):
        g = np.linspace(0, 1, 65)
        z = Signal(g, np.zeros(65), deriv=lambda n, t: np.zeros_like(np.asarray(t, dtype=float)))
        r = gevrey_norm_time(z, P2, 8)
        assert r.total == 0.0 and r.converged

    def test_gaussian_l2_norms_analytic(self):
        # || d^n/dt^n e^{-t^2/2} ||_{L2}^2 = Gamma(n + 1/2) via Plancherel
        sig = gaussian_signal(0.0, 1.0)
        from heatflat.gevrey import _log_l2_norm

        for n in range(0, 11):
            log_norm, ok = _log_l2_norm(lambda t, n=n: sig.deriv(n, t), sig.t0, sig.t1)
            assert ok
            want = 0.5 * math.lgamma(n + 0.5)
            assert abs(log_norm - want) < 1e-8 * max(1.0, abs(want))

    def test_gaussian_converges(self):
        r = gevrey_norm_time(gaussian_signal(0.0, 1.0), P2, 16)
        assert r.converged
        assert np.all(np.diff(r.partial_sums) >= 0)

    def test_requires_derivatives(self):
        g = np.linspace(0, 1, 65)
        with pytest.raises(ValueError):
            gevrey_norm_time(Signal(g, np.zeros(65)), P2, 4)

    @pytest.mark.parametrize("seed", range(4))
    def test_dilation_jacobian(self, seed):
        # psi(t) = phi(R^s t): ||psi||_(s,1,gamma) = R^{-s/2} ||phi||_(s,R,gamma)
        rng = np.random.default_rng(seed)
        s, R = 2.0, float(rng.uniform(0.4, 0.9))
        gamma = float(rng.uniform(-0.6, 0.6))
        c = float(rng.uniform(-0.5, 0.5))
        sg = float(rng.uniform(0.8, 1.3))
        phi = gaussian_signal(c, sg, grid=np.linspace(-14, 14, 2049))
        Rs = R**s
        psi = Signal(
            phi.grid / Rs,
            phi.values,
            deriv=lambda n, t: phi.deriv(n, np.asarray(t) * Rs) * Rs**n,
            family="dilated",
        )
        n1 = gevrey_norm_time(psi, GevreyParams(s, 1.0, gamma), 10).total
        n2 = gevrey_norm_time(phi, GevreyParams(s, R, gamma), 10).total
        assert abs(n1 - n2 / Rs) < 1e-6 * abs(n1)


class TestWeightedFourierNorm:
    def test_parseval_at_tiny_R(self):
        sig = gaussian_signal(0.0, 1.0)
        val = weighted_fourier_norm(sig, GevreyParams(2.0, 1e-12, 0.0))
        l2sq = math.sqrt(math.pi)  # integral of e^{-t^2}
        assert abs(val - l2sq) < 1e-6 * l2sq

    def test_gaussian_closed_form_oracle(self):
        # F phi = e^{-xi^2/2}; independent quadrature of the weighted integral
        sig = gaussian_signal(0.0, 1.0)
        val = weighted_fourier_norm(sig, P2)
        want = 2.0 * quad(lambda x: math.exp(-x * x + 2 * P2.R * math.sqrt(x)), 0, 40,
                          limit=200)[0]
        assert abs(val - want) < 1e-6 * want

    def test_monotone_in_R_and_gamma(self):
        sig = gaussian_signal(0.0, 1.0)
        v = [weighted_fourier_norm(sig, GevreyParams(2.0, r, 0.0)) for r in (0.2, 0.4, 0.6)]
        assert v[0] < v[1] < v[2]
        w = [weighted_fourier_norm(sig, GevreyParams(2.0, 0.5, g)) for g in (-0.5, 0.0, 0.5)]
        assert w[0] < w[1] < w[2]

    def test_leaky_signal_rejected(self):
        g = np.linspace(-2, 2, 257)
        sig = Signal(g, np.exp(-g**2 / 2), deriv=None)
        with pytest.raises(ValueError):
            weighted_fourier_norm(sig, P2)

    def test_ratio_band(self):
        # Fourier/time ratio stays in one modest band across the family
        sigs = [gaussian_signal(0.0, 1.0), gaussian_signal(1.5, 0.7),
                two_sided_bump(0.0, 3.0, 1.5), two_sided_bump(0.5, 2.0, 2.0)]
        ratios = []
        for sig in sigs:
            tn = gevrey_norm_time(sig, P2, 14)
            assert tn.converged
            ratios.append(weighted_fourier_norm(sig, P2) / tn.total)
        chat = max(max(ratios), 1.0 / min(ratios))
        assert chat < 50.0


class TestBumpGevrey:
    def test_flat_at_zero(self):
        sig = bump_gevrey(1.0)
        t = np.array([-1.0, -0.1, 0.0])
        for n in range(0, 8):
            assert np.all(sig.deriv(n, t) == 0.0)

    def test_value_and_first_derivative_at_1(self):
        sig = bump_gevrey(1.0)
        t = np.array([1.0])
        assert abs(sig.deriv(0, t)[0] - math.exp(-1.0)) < 1e-15
        # d/dt e^{-1/t} = t^{-2} e^{-1/t} = e^{-1} at t=1
        assert abs(sig.deriv(1, t)[0] - math.exp(-1.0)) < 1e-14

    def test_order6_richardson_fd(self):
        # independent finite-difference oracle; the 6th difference at h=1e-3
        # cancels below float64 resolution, so the stencil values come from
        # a 50-digit evaluation of the elementary function itself
        sig = bump_gevrey(1.0)
        t0, h = 0.5, 1e-3

        def stencil(hh):
            c = [1, -6, 15, -20, 15, -6, 1]
            with mp.workdps(50):
                s = mp.fsum(
                    ci * mp.exp(-1 / (t0 + mp.mpf(hh) * k)) for ci, k in zip(c, range(-3, 4))
                )
                return float(s / mp.mpf(hh) ** 6)

        a, b = stencil(h), stencil(h / 2)
        fd = b + (b - a) / 3.0  # Richardson in h^2
        got = float(sig.deriv(6, np.array([t0]))[0])
        assert abs(got - fd) < 1e-5 * abs(got)

    def test_invalid_gamma(self):
        with pytest.raises(ValueError):
            bump_gevrey(0.0)


class TestGevreyCutoff:
    def test_endpoint_values(self):
        chi = gevrey_cutoff(0.2, 0.8, 1.5)
        t = np.array([0.2, 0.8])
        v = chi.deriv(0, t)
        assert abs(v[0] - 1.0) < 1e-12
        assert abs(v[1]) < 1e-12

    def test_monotone_nonincreasing(self):
        chi = gevrey_cutoff(0.0, 1.0, 1.5)
        t = np.linspace(-0.2, 1.2, 400)
        v = chi.deriv(0, t)
        assert np.all(np.diff(v) <= 1e-12)

    def test_product_with_gevrey2_signal_stays_summable(self):
        # chi * phi keeps a finite partial norm at slightly reduced radius
        grid = np.linspace(-6.0, 6.0, 2049)
        chi = gevrey_cutoff(1.0, 3.0, 1.5, grid=grid)
        for phi in [gaussian_signal(0.0, 1.0, grid=grid),
                    gaussian_signal(0.7, 1.2, grid=grid),
                    two_sided_bump(0.0, 4.0, 2.0, grid=grid)]:
            prod = product_signal(chi, phi)
            r = gevrey_norm_time(prod, GevreyParams(2.0, 0.45, 0.0), 12)
            assert np.isfinite(r.total)
            assert r.converged

    def test_interval_validation(self):
        with pytest.raises(ValueError):
            gevrey_cutoff(1.0, 0.5, 1.5)
        with pytest.raises(ValueError):
            gevrey_cutoff(0.0, 1.0, 2.5)


class TestFourierDecayFit:
    def test_bump_positive_delta(self):
        fit = fourier_decay_fit(two_sided_bump(0.0, 1.0, 1.0), 2.0)
        assert isinstance(fit, DecayFit)
        assert fit.delta > 0
        assert not fit.mismatch

    def test_gaussian_vs_order1_mismatch(self):
        g = gaussian_signal(0.0, 1.0, grid=np.linspace(-10, 10, 2049))
        window = two_sided_bump(0.0, 9.0, 2.0, grid=np.linspace(-10, 10, 2049))
        fit = fourier_decay_fit(product_signal(g, window), 1.0)
        assert fit.mismatch

    def test_mollifier_scaling(self):
        sig = two_sided_bump(0.0, 1.0, 1.0)
        base = fourier_decay_fit(sig, 2.0)
        eps = 0.5
        grid = np.linspace(-1.0, 1.0, 2049)
        scaled = Signal(
            grid,
            sig.deriv(0, grid / eps) / eps,
            deriv=lambda n, t: sig.deriv(n, np.asarray(t) / eps) / eps ** (n + 1),
            compact_support=True,
        )
        fit = fourier_decay_fit(scaled, 2.0)
        assert abs(fit.delta / base.delta - eps ** 0.5) < 0.05 * eps ** 0.5

    def test_requires_compact_support(self):
        with pytest.raises(ValueError):
            fourier_decay_fit(gaussian_signal(0.0, 1.0), 2.0)
