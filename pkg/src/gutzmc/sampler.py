"""Importance sampling over auxiliary-field configurations.

A sampled configuration holds two ±1 fields per site (one for the ket
dressing, one for the bra dressing).  Its unnormalized weight is

    W(s) = <psi0| u(s_:,2) u(s_:,1) |psi0>,

which factorizes over spin sectors for a spin-separable trial state and,
for the half-filled bipartite case, is real and nonnegative — the regime
this sampler requires.  Metropolis-Hastings proposes single-field flips
in a fixed order (one sweep proposes every field exactly once), always
consuming one uniform draw per proposal so that runs with different
weight backends share the same random stream.

Two weight backends are provided: a determinant backend working with
k x k sector overlap matrices (k = particles per spin) and a statevector
backend summing diagonal dressing phases over the trial state's
occupation support.  They are required to agree to 1e-10 and are
cross-checked in the test suite.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gutzwiller import HSParams, field_coupling_matrix, hs_params
from .lattice import Lattice, QubitLayout, hopping_matrix, hubbard_terms
from .pauli import PauliSum, apply_pauli_sum
from .slater import (
    TrialState,
    dressed_green_function,
    dressed_overlap,
    half_filled_trial,
    slater_to_statevector,
)
from .statevector import StateVector, apply_circuit

BACKENDS = ("statevector", "determinant")

# Weights are mathematically real positive in the supported regime;
# these relative tolerances separate roundoff from a genuine violation.
_IMAG_TOL = 1e-8
_NEG_TOL = 1e-8


class PhaseProblemError(ArithmeticError):
    """A sampled weight turned complex or negative beyond tolerance."""


@dataclass(frozen=True)
class McParams:
    """Monte Carlo run parameters."""

    n_sweeps: int
    n_burnin: int | None = None
    n_bins: int = 20
    rng_seed: int = 0
    backend: str = "determinant"

    def __post_init__(self) -> None:
        if self.n_bins < 10:
            raise ValueError(f"need at least 10 bins, got {self.n_bins}")
        if self.n_sweeps % self.n_bins != 0:
            raise ValueError(
                f"n_sweeps={self.n_sweeps} not divisible by n_bins={self.n_bins}"
            )
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")

    @property
    def burnin(self) -> int:
        """Burn-in sweep count: 10% of the run, floored at 500."""
        if self.n_burnin is not None:
            return self.n_burnin
        return max(500, self.n_sweeps // 10)


@dataclass(frozen=True)
class EstimatorResult:
    observable: str
    mean: float
    stderr: float
    n_samples: int
    acceptance_rate: float


@dataclass
class McSamples:
    """Per-bin kinetic and double-occupancy means from one chain.

    Both observables are sampled jointly and are independent of U, so a
    single chain serves every interaction strength.
    """

    k_bins: np.ndarray
    d_bins: np.ndarray
    acceptance_rate: float
    n_sweeps: int


class _DeterminantEngine:
    """Cached sector overlap matrices; one k x k determinant per proposal.

    Only the per-site total field t_i = s_{i,1} + s_{i,2} enters the
    weight: W_sector = e^{-i*alpha*sum(t)/2} det(phi^H diag(e^{i*alpha*t}) phi).
    A single flip shifts one diagonal entry, i.e. adds a rank-one update
    to the overlap matrix, which is rebuilt cheaply from a precomputed
    row outer product.  Determinants are recomputed in full — at k ≤ 6
    that is faster and safer than tracking inverses.
    """

    def __init__(self, trial: TrialState, params: HSParams):
        self.alpha = params.alpha
        if trial.spin_symmetric:
            self.phis = [trial.up.phi]
            self.symmetric = True
        else:
            self.phis = [trial.up.phi, trial.down.phi]
            self.symmetric = False
        self.outers = [
            np.einsum("ia,ib->iab", phi.conj(), phi) for phi in self.phis
        ]
        self.total = np.zeros(trial.lattice.n_sites, dtype=np.int64)
        self.grams: list[np.ndarray] = []
        self.dets: list[complex] = []
        self._pending: tuple | None = None
        # At most 3^N distinct total fields exist; for small systems the
        # per-proposal linear algebra repeats endlessly, so memoize it.
        # Memo-enabled engines keep the cached matrices canonical (always
        # the from-scratch build for the current total field, also after
        # commits), which makes every cache entry a pure function of its
        # key; larger systems keep the incremental-update arithmetic.
        small = trial.lattice.n_sites <= 6
        self._memo_reset: dict | None = {} if small else None
        self._memo_ratio: dict | None = {} if small else None

    def reset(self, total: np.ndarray) -> complex:
        """Rebuild all caches for the given total field; return W."""
        self.total = np.asarray(total, dtype=np.int64).copy()
        self._pending = None
        if self._memo_reset is not None:
            key = self.total.tobytes()
            hit = self._memo_reset.get(key)
            if hit is None:
                hit = self._rebuild()
                self._memo_reset[key] = hit
        else:
            hit = self._rebuild()
        self.grams, self.dets, weight = hit
        return weight

    def _rebuild(self) -> tuple[list[np.ndarray], list[complex], complex]:
        phases = np.exp(1j * self.alpha * self.total)
        grams = [phi.conj().T @ (phases[:, None] * phi) for phi in self.phis]
        dets = [complex(np.linalg.det(g)) for g in grams]
        prefactor = np.exp(-0.5j * self.alpha * self.total.sum())
        w = 1.0 + 0.0j
        for det in dets:
            w *= prefactor * det
        if self.symmetric:
            w *= prefactor * dets[0]
        return grams, dets, complex(w)

    def proposal_ratio(self, site: int, new_total: int) -> complex:
        """W(t with t_site -> new_total) / W(t), caching the trial update."""
        if self._memo_ratio is not None:
            key = (self.total.tobytes(), site, new_total)
            hit = self._memo_ratio.get(key)
            if hit is None:
                hit = self._trial_update(site, new_total)
                self._memo_ratio[key] = hit
        else:
            hit = self._trial_update(site, new_total)
        ratio, new_grams, new_dets = hit
        self._pending = (site, new_total, new_grams, new_dets)
        return ratio

    def _trial_update(
        self, site: int, new_total: int
    ) -> tuple[complex, list[np.ndarray], list[complex]]:
        dphase = np.exp(1j * self.alpha * new_total) - np.exp(
            1j * self.alpha * self.total[site]
        )
        delta = new_total - self.total[site]
        pref_ratio = np.exp(-0.5j * self.alpha * delta)
        new_grams, new_dets, ratio = [], [], 1.0 + 0.0j
        for sector, gram in enumerate(self.grams):
            updated = gram + dphase * self.outers[sector][site]
            det = complex(np.linalg.det(updated))
            new_grams.append(updated)
            new_dets.append(det)
            ratio *= pref_ratio * det / self.dets[sector]
        if self.symmetric:
            ratio *= pref_ratio * new_dets[0] / self.dets[0]
        return complex(ratio), new_grams, new_dets

    def commit(self) -> None:
        site, new_total, grams, dets = self._pending
        self.total[site] = new_total
        self._pending = None
        if self._memo_reset is not None:
            key = self.total.tobytes()
            hit = self._memo_reset.get(key)
            if hit is None:
                hit = self._rebuild()
                self._memo_reset[key] = hit
            self.grams, self.dets, _ = hit
        else:
            self.grams = grams
            self.dets = dets

    def green_functions(self, config: np.ndarray) -> list[np.ndarray]:
        """Per-spin Green matrices at the current cached configuration."""
        ket_phase = np.exp(1j * self.alpha * config[:, 0].astype(np.float64))
        bra_phase = np.exp(-1j * self.alpha * config[:, 1].astype(np.float64))
        greens = []
        for sector, phi in enumerate(self.phis):
            b_mat = ket_phase[:, None] * phi
            a_dag = (bra_phase[:, None] * phi).conj().T
            greens.append(b_mat @ np.linalg.solve(self.grams[sector], a_dag))
        if self.symmetric:
            greens.append(greens[0])
        return greens


class _StatevectorEngine:
    """Weights from the trial state's occupation support.

    Both dressings are diagonal, so W(s) = sum_b |psi0(b)|^2
    e^{i*alpha*m(b)·t} with m(b) the per-site charge imbalance; only
    basis states in the trial's support contribute.
    """

    def __init__(self, trial: TrialState, params: HSParams):
        if trial.lattice.n_sites > 8:
            raise ValueError("statevector backend supports at most 8 sites")
        self.alpha = params.alpha
        layout = QubitLayout(trial.lattice.n_sites)
        psi = slater_to_statevector(trial.up, trial.down, layout)
        prob = np.abs(psi.amplitudes) ** 2
        support = np.flatnonzero(prob > 1e-28)
        self.prob = prob[support]
        self.m_support = field_coupling_matrix(layout)[support].astype(np.float64)
        self.total = np.zeros(trial.lattice.n_sites, dtype=np.int64)
        self.current = 1.0 + 0.0j
        self._pending: tuple | None = None

    def _weight_of(self, total: np.ndarray) -> complex:
        return complex(self.prob @ np.exp(1j * self.alpha * (self.m_support @ total)))

    def reset(self, total: np.ndarray) -> complex:
        self.total = np.asarray(total, dtype=np.int64).copy()
        self.current = self._weight_of(self.total.astype(np.float64))
        self._pending = None
        return self.current

    def proposal_ratio(self, site: int, new_total: int) -> complex:
        trial_total = self.total.astype(np.float64)
        trial_total[site] = new_total
        w_new = self._weight_of(trial_total)
        self._pending = (site, new_total, w_new)
        return complex(w_new / self.current)

    def commit(self) -> None:
        site, new_total, w_new = self._pending
        self.total[site] = new_total
        self.current = w_new
        self._pending = None


@dataclass
class ChainState:
    """One Markov chain: configuration, cached weight, weight engine."""

    config: np.ndarray
    weight: complex
    engine: _DeterminantEngine | _StatevectorEngine
    w_scale: float = 0.0
    max_drift: float = 0.0
    n_flagged: int = 0


def make_chain(trial: TrialState, params: HSParams, backend: str = "determinant") -> ChainState:
    """Fresh chain at the all-(+1) configuration."""
    n = trial.lattice.n_sites
    config = np.ones((n, 2), dtype=np.int64)
    if backend == "determinant":
        engine: _DeterminantEngine | _StatevectorEngine = _DeterminantEngine(trial, params)
    elif backend == "statevector":
        engine = _StatevectorEngine(trial, params)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    weight = engine.reset(config.sum(axis=1))
    chain = ChainState(config=config, weight=weight, engine=engine)
    chain.w_scale = abs(weight)
    _check_weight(chain, weight)
    return chain


def _check_weight(chain: ChainState, w: complex) -> None:
    scale = max(chain.w_scale, abs(w))
    if abs(w.imag) > _IMAG_TOL * scale or w.real < -_NEG_TOL * scale:
        raise PhaseProblemError(
            f"weight {w!r} is not real nonnegative (scale {scale:.3e}); "
            "the trial state is outside the sign-free regime"
        )
    chain.w_scale = scale


def metropolis_sweep(
    chain: ChainState,
    trial: TrialState,
    params: HSParams,
    rng: np.random.Generator,
) -> tuple[ChainState, int]:
    """Propose one flip of every field; return the chain and accept count.

    Proposal order is site-major (site 0 copy 1, site 0 copy 2, site 1
    copy 1, …).  One uniform variate is consumed per proposal whether or
    not the ratio decides deterministically, keeping random streams
    aligned across weight backends.  The sweep ends by re-anchoring the
    cached weight against a from-scratch evaluation.
    """
    accepted = 0
    for site in range(trial.lattice.n_sites):
        for copy in (0, 1):
            u = rng.random()
            new_total = int(chain.config[site, 0] + chain.config[site, 1]) - 2 * int(
                chain.config[site, copy]
            )
            ratio = chain.engine.proposal_ratio(site, new_total)
            w_new = chain.weight * ratio
            _check_weight(chain, w_new)
            r = w_new.real / chain.weight.real
            if r >= 1.0 or u < r:
                chain.config[site, copy] = -chain.config[site, copy]
                chain.weight = w_new
                chain.engine.commit()
                accepted += 1
    fresh = chain.engine.reset(chain.config.sum(axis=1))
    denom = max(abs(fresh), 1e-300)
    chain.max_drift = max(chain.max_drift, abs(fresh - chain.weight) / denom)
    chain.weight = fresh
    return chain, accepted


def _total_field(config: np.ndarray, n_sites: int) -> np.ndarray:
    s = np.asarray(config, dtype=np.int64)
    if s.shape != (n_sites, 2) or np.any(np.abs(s) != 1):
        raise ValueError(f"bad field configuration of shape {s.shape}")
    return s.sum(axis=1)


def weight_numerator(
    config: np.ndarray,
    trial: TrialState,
    params: HSParams,
    backend: str = "determinant",
) -> complex:
    """Unnormalized weight W(s) of one configuration.

    The determinant backend multiplies the two sector overlaps; the
    statevector backend applies both dressing circuits to the trial
    register and takes the inner product.
    """
    n = trial.lattice.n_sites
    _total_field(config, n)
    if backend == "determinant":
        w = dressed_overlap(trial.up, config, params.alpha).value
        if trial.spin_symmetric:
            return w * w
        return w * dressed_overlap(trial.down, config, params.alpha).value
    if backend == "statevector":
        from .gutzwiller import field_rotation_circuit

        layout = QubitLayout(n)
        psi = slater_to_statevector(trial.up, trial.down, layout)
        dressed = apply_circuit(psi.copy(), field_rotation_circuit(config, 1, params, layout))
        dressed = apply_circuit(dressed, field_rotation_circuit(config, 2, params, layout))
        return psi.inner(dressed)
    raise ValueError(f"unknown backend {backend!r}")


def _observable_pauli(observable, lattice: Lattice, J: float) -> PauliSum:
    if isinstance(observable, PauliSum):
        return observable
    kinetic, interaction = hubbard_terms(lattice, J, 1.0)
    if observable == "kinetic":
        return kinetic
    if observable == "interaction":
        return interaction
    raise ValueError(f"unknown observable {observable!r}")


def local_estimator(
    config: np.ndarray,
    observable,
    trial: TrialState,
    params: HSParams,
    backend: str = "determinant",
    J: float = 1.0,
) -> complex:
    """Ratio <psi0|u(s2) Ô u(s1)|psi0> / W(s) for one configuration.

    observable is "kinetic", "interaction", or (statevector backend
    only) an explicit PauliSum on the register.  The determinant backend
    evaluates the hopping sum as tr(T·M) per spin sector and the
    double-occupancy sum from the Green diagonals; both derive from the
    same per-spin Green matrices.
    """
    n = trial.lattice.n_sites
    config = np.asarray(config, dtype=np.int64)
    _total_field(config, n)
    if backend == "determinant":
        greens = [
            dressed_green_function(trial.up, config[:, 1], config[:, 0], params.alpha)
        ]
        if trial.spin_symmetric:
            greens.append(greens[0])
        else:
            greens.append(
                dressed_green_function(trial.down, config[:, 1], config[:, 0], params.alpha)
            )
        if observable == "kinetic":
            t_mat = hopping_matrix(trial.lattice, J)
            return complex(sum(np.sum(t_mat * m.T) for m in greens))
        if observable == "interaction":
            up_diag = np.diagonal(greens[0]) - 0.5
            dn_diag = np.diagonal(greens[1]) - 0.5
            return complex(np.sum(up_diag * dn_diag))
        raise ValueError("determinant backend supports 'kinetic' and 'interaction' only")
    if backend == "statevector":
        from .gutzwiller import field_rotation_circuit

        op = _observable_pauli(observable, trial.lattice, J)
        layout = QubitLayout(n)
        psi = slater_to_statevector(trial.up, trial.down, layout)
        ket = apply_circuit(psi.copy(), field_rotation_circuit(config, 1, params, layout))
        obs_amps = apply_pauli_sum(ket.amplitudes, op)
        obs_ket = StateVector(ket.n_qubits, obs_amps)
        obs_ket = apply_circuit(obs_ket, field_rotation_circuit(config, 2, params, layout))
        dressed = apply_circuit(ket, field_rotation_circuit(config, 2, params, layout))
        w = psi.inner(dressed)
        if abs(w) < 1e-300:
            raise ArithmeticError("vanishing weight denominator")
        return psi.inner(obs_ket) / w
    raise ValueError(f"unknown backend {backend!r}")


def _measure_kd(
    chain: ChainState,
    trial: TrialState,
    params: HSParams,
    J: float,
    cache: dict[bytes, tuple[float, float]] | None = None,
) -> tuple[float, float]:
    """Kinetic and double-occupancy local estimators at the current config.

    The exact weighted averages of these ratios are real; per-sample
    imaginary parts average to zero by symmetry, so the real part is an
    unbiased (and lower-variance) estimator.  Called between sweeps the
    value is a pure function of the configuration, so the sampling loop
    passes a memo dict for small systems.
    """
    if cache is not None:
        key = chain.config.tobytes()
        hit = cache.get(key)
        if hit is None:
            hit = _measure_kd(chain, trial, params, J)
            cache[key] = hit
        return hit
    if isinstance(chain.engine, _DeterminantEngine):
        greens = chain.engine.green_functions(chain.config)
        t_mat = hopping_matrix(trial.lattice, J)
        kinetic = sum(np.sum(t_mat * m.T) for m in greens)
        docc = np.sum((np.diagonal(greens[0]) - 0.5) * (np.diagonal(greens[1]) - 0.5))
        return float(np.real(kinetic)), float(np.real(docc))
    kinetic = local_estimator(chain.config, "kinetic", trial, params, "statevector", J)
    docc = local_estimator(chain.config, "interaction", trial, params, "statevector", J)
    return float(kinetic.real), float(docc.real)


def sample_kinetic_interaction(
    lattice: Lattice, J: float, g: float, mc_params: McParams
) -> McSamples:
    """Run one chain and bin the kinetic and double-occupancy samples.

    Neither observable depends on U, so the returned bins can be combined
    with any interaction strength afterwards.
    """
    trial = half_filled_trial(lattice)
    params = hs_params(g)
    rng = np.random.default_rng(mc_params.rng_seed)
    chain = make_chain(trial, params, mc_params.backend)
    for _ in range(mc_params.burnin):
        metropolis_sweep(chain, trial, params, rng)
    k_samples = np.empty(mc_params.n_sweeps)
    d_samples = np.empty(mc_params.n_sweeps)
    accepted = 0
    kd_cache: dict[bytes, tuple[float, float]] | None = (
        {} if lattice.n_sites <= 6 else None
    )
    for sweep in range(mc_params.n_sweeps):
        _, n_acc = metropolis_sweep(chain, trial, params, rng)
        accepted += n_acc
        k_samples[sweep], d_samples[sweep] = _measure_kd(
            chain, trial, params, J, kd_cache
        )
    per_bin = mc_params.n_sweeps // mc_params.n_bins
    return McSamples(
        k_bins=k_samples.reshape(mc_params.n_bins, per_bin).mean(axis=1),
        d_bins=d_samples.reshape(mc_params.n_bins, per_bin).mean(axis=1),
        acceptance_rate=accepted / (mc_params.n_sweeps * 2 * lattice.n_sites),
        n_sweeps=mc_params.n_sweeps,
    )


def _binned(name: str, bins: np.ndarray, samples: McSamples) -> EstimatorResult:
    n_bins = bins.size
    stderr = float(np.std(bins, ddof=1) / np.sqrt(n_bins)) if n_bins > 1 else 0.0
    return EstimatorResult(
        observable=name,
        mean=float(np.mean(bins)),
        stderr=stderr,
        n_samples=samples.n_sweeps,
        acceptance_rate=samples.acceptance_rate,
    )


def results_from_samples(samples: McSamples, U: float) -> list[EstimatorResult]:
    """Assemble E, K, U<D> estimates (E combined per-bin, so correlations count)."""
    ud_bins = U * samples.d_bins
    return [
        _binned("energy", samples.k_bins + ud_bins, samples),
        _binned("kinetic", samples.k_bins, samples),
        _binned("interaction", ud_bins, samples),
    ]


def run_mc(
    lattice: Lattice, J: float, U: float, g: float, mc_params: McParams
) -> list[EstimatorResult]:
    """Full MC estimate of E = <K> + U<D> at one (g, U) point."""
    if U < 0:
        raise ValueError(f"U must be nonnegative, got {U}")
    samples = sample_kinetic_interaction(lattice, J, g, mc_params)
    return results_from_samples(samples, U)


@dataclass(frozen=True)
class PhaseCheckReport:
    """Exhaustive weight scan: is the sign-free assumption satisfied?"""

    n_sites: int
    g: float
    n_configs: int
    max_imag: float
    min_real: float

    @property
    def passed(self) -> bool:
        return self.max_imag < 1e-10 and self.min_real >= -1e-12


def phase_problem_check(
    lattice: Lattice, g: float, trial: TrialState | None = None
) -> PhaseCheckReport:
    """Enumerate all 4^N weights and report the worst imaginary/negative parts."""
    n = lattice.n_sites
    if n > 5:
        raise ValueError(f"{n} sites is too large for 4^N weight enumeration (max 5)")
    if trial is None:
        trial = half_filled_trial(lattice)
    params = hs_params(g)
    singles = _single_field_vectors(n)
    # total field t = s1 + s2 for every ordered pair of single-copy vectors
    totals = (singles[:, None, :] + singles[None, :, :]).reshape(-1, n).astype(np.float64)
    weights = np.ones(totals.shape[0], dtype=complex)
    prefactors = np.exp(-0.5j * params.alpha * totals.sum(axis=1))
    sectors = [trial.up] if trial.spin_symmetric else [trial.up, trial.down]
    powers = 2 if trial.spin_symmetric else 1
    for sector in sectors:
        phases = np.exp(1j * params.alpha * totals)
        grams = np.einsum("ia,ci,ib->cab", sector.phi.conj(), phases, sector.phi)
        weights *= (prefactors * np.linalg.det(grams)) ** powers
    return PhaseCheckReport(
        n_sites=n,
        g=float(g),
        n_configs=weights.size,
        max_imag=float(np.max(np.abs(weights.imag))),
        min_real=float(np.min(weights.real)),
    )


def _single_field_vectors(n_sites: int) -> np.ndarray:
    idx = np.arange(1 << n_sites, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n_sites - 1, -1, -1)) & 1
    return (2 * bits - 1).astype(np.int64)
