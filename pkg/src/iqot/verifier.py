"""Security audits: exhaustive or Monte-Carlo estimates of the distance conditions.

Distances are l1 sums without the 1/2 factor. Monte-Carlo conditions pass when
the estimate is at most the bound plus three standard errors; exhaustive ones
use a 1e-12 slack.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from itertools import product
from pathlib import Path
from typing import Any, Callable, Iterable

import numpy as np

from .adversary import (
    alternating_plan,
    dishonest_bob_delayed,
    dishonest_bob_single_basis,
    half_measured_plan,
    hash_keyed_plan,
)
from .bitmath import (
    BitString,
    FiniteDistribution,
    NdlFunction,
    enumerate_ndlfs,
    min_entropy,
    statistical_distance,
)
from .errors import DomainError, FeasibilityError, PreconditionError, StateError
from .hashing import PolyHash, eval_index_hash, index_hash_bits, mul_table, sample_hash
from .protocols.compose import kot_chain, ot_from_rot, srot
from .protocols.engine import (
    HonestBob,
    Session,
    SessionConfig,
    SessionRngs,
    Strategy,
    encode_payload,
    party_rng,
    run_session,
)
from .protocols.ideal import ideal_krot
from .protocols.rot import rot, run_string_rot
from .quantum import Basis

EXACT_TOL = 1e-12
SIGMA_MARGIN = 3.0


# -------------------------------------------------------------------- reports


@dataclass
class Condition:
    name: str
    estimate: float
    stderr: float
    method: str  # "exhaustive" or "monte-carlo(N)"
    bound: float | None
    passed: bool
    note: str = ""


def mc_condition(name: str, samples, bound: float | None, note: str = "") -> Condition:
    """Mean of per-trial samples with its standard error, compared to ``bound``."""
    values = np.asarray(list(samples), dtype=float)
    n = len(values)
    mean = math.fsum(values) / n
    se = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    passed = True if bound is None else mean <= bound + SIGMA_MARGIN * se + EXACT_TOL
    return Condition(name, mean, se, f"monte-carlo({n})", bound, bool(passed), note)


def exact_condition(name: str, value: float, bound: float | None, note: str = "") -> Condition:
    passed = True if bound is None else value <= bound + EXACT_TOL
    return Condition(name, float(value), 0.0, "exhaustive", bound, bool(passed), note)


@dataclass
class SecurityReport:
    definition: str
    conditions: list[Condition] = field(default_factory=list)
    ledger: dict = field(default_factory=dict)
    trials: int = 0
    seed: int | None = None
    flags: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if all(c.passed for c in self.conditions) else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def condition(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "definition": self.definition,
            "verdict": self.verdict,
            "conditions": [asdict(c) for c in self.conditions],
            "ledger": self.ledger,
            "trials": self.trials,
            "seed": self.seed,
            "flags": list(self.flags),
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.to_json())

    def summary(self) -> str:
        lines = [f"{self.definition}: {self.verdict} (trials={self.trials}, seed={self.seed})"]
        for c in self.conditions:
            bound = "-" if c.bound is None else f"{c.bound:.6g}"
            mark = "ok" if c.passed else "FAIL"
            lines.append(
                f"  [{mark}] {c.name}: estimate={c.estimate:.6g} se={c.stderr:.3g} "
                f"bound={bound} method={c.method}" + (f" ({c.note})" if c.note else "")
            )
        for key in sorted(self.ledger):
            lines.append(f"  ledger {key} = {self.ledger[key]}")
        for flag in self.flags:
            lines.append(f"  flag: {flag}")
        return "\n".join(lines)


# ------------------------------------------------------------------ plumbing


def map_trials(fn: Callable[[int], Any], trials: int, parallel: int = 1) -> list:
    """Results of ``fn(trial_id)`` in trial order, optionally across processes."""
    if parallel <= 1 or trials < 2:
        return [fn(i) for i in range(trials)]
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(fn, range(trials), chunksize=max(1, trials // (4 * parallel))))


class ScriptedRng:
    """Stand-in generator replaying a fixed list of integers.

    Used to push every outcome of a sender's coins through the real protocol
    code during exhaustive enumeration.
    """

    def __init__(self, values: Iterable[int]):
        self._values = list(values)
        self._pos = 0

    def integers(self, low, high=None, size=None):
        if high is None:
            low, high = 0, low
        count = 1 if size is None else int(size)
        out = self._values[self._pos : self._pos + count]
        if len(out) < count:
            raise StateError("scripted randomness exhausted")
        if any(not low <= v < high for v in out):
            raise DomainError("scripted value outside the requested range")
        self._pos += count
        return np.array(out, dtype=np.int64) if size is not None else out[0]

    @property
    def exhausted(self) -> bool:
        return self._pos == len(self._values)


def _scripted_session(cfg: SessionConfig, bits: Iterable[int]) -> Session:
    rngs = SessionRngs(ScriptedRng(bits), np.random.default_rng(0))
    return Session(cfg, rngs)


def _strings(width: int) -> list[BitString]:
    return [BitString.from_int(v, width) for v in range(1 << width)]


def _independence_distance(pairs: dict, secret_space: int) -> float:
    """||P(X, V) - U x P(V)|| for a joint given as {(x, v): p} with X uniform-reference."""
    joint = FiniteDistribution(pairs)
    view = joint.map(lambda o: o[1])
    xs = {x for (x, _) in joint.support}
    if len(xs) > secret_space:
        raise DomainError("secret space smaller than observed support")
    universe = _secret_universe(joint, secret_space)
    ref: dict = {}
    for v, pv in view.items():
        for x in universe:
            ref[(x, v)] = pv / secret_space
    return statistical_distance(joint, FiniteDistribution(ref))


def _secret_universe(joint: FiniteDistribution, size: int):
    xs = sorted({x for (x, _) in joint.support}, key=repr)
    if len(xs) == size:
        return xs
    # pad with placeholders for secrets that never occur
    return xs + [("absent", i) for i in range(size - len(xs))]


# ------------------------------------------------------------ ROT strategies

STRATEGIES = ("single-computational", "single-hadamard", "delayed-hash", "delayed-alternating", "delayed-half")


def make_strategy(name: str, cfg: SessionConfig) -> Strategy:
    if name == "single-computational":
        return dishonest_bob_single_basis(Basis.COMPUTATIONAL)
    if name == "single-hadamard":
        return dishonest_bob_single_basis(Basis.HADAMARD)
    if name == "delayed-hash":
        return dishonest_bob_delayed(hash_keyed_plan)
    if name == "delayed-alternating":
        return dishonest_bob_delayed(alternating_plan(cfg.block_bits))
    if name == "delayed-half":
        return dishonest_bob_delayed(half_measured_plan)
    if name.startswith("honest-"):
        return HonestBob(int(name.split("-", 1)[1]))
    raise DomainError(f"unknown strategy {name!r}")


# ---------------------------------------------------- ROT security for Alice


def _branch_likelihoods(cfg: SessionConfig, measurements, branch: int) -> np.ndarray:
    """Per block, the likelihood of Bob's outcomes if the block carries branch's codeword.

    Branch 0 is C(s) in the computational basis, branch 1 is C(t) in the
    Hadamard basis. Rows are blocks, columns are candidate messages.
    """
    code = cfg.code
    bb = cfg.block_bits
    blocks = code.codeword_blocks
    lik = np.ones((code.block_count, blocks.shape[0]))
    for index, basis, outcome in measurements:
        blk, j = divmod(index, bb)
        if basis == branch:
            bit = (blocks[:, blk] >> (bb - 1 - j)) & 1
            lik[blk] *= bit == outcome
        else:
            lik[blk] *= 0.5
    return lik


def rot_posterior(cfg: SessionConfig, F: PolyHash, G: PolyHash, measurements) -> np.ndarray:
    """Exact P(A0, A1 | F, G, bases, outcomes) as a 2^l' x 2^l' array."""
    l0 = _branch_likelihoods(cfg, measurements, 0)
    l1 = _branch_likelihoods(cfg, measurements, 1)
    post = np.ones((l0.shape[1], l1.shape[1]))
    for blk in range(l0.shape[0]):
        post *= 0.5 * l0[blk][:, None] + 0.5 * l1[blk][None, :]
        post /= post.max()
    post /= post.sum()
    m = 1 << cfg.ell_prime
    fa = np.array([F.eval_int(s) for s in range(post.shape[0])])
    ga = np.array([G.eval_int(t) for t in range(post.shape[1])])
    idx = fa[:, None] * m + ga[None, :]
    return np.bincount(idx.ravel(), weights=post.ravel(), minlength=m * m).reshape(m, m)


def conditional_rot_distance(joint: np.ndarray, d_prime: int) -> float:
    """sum |P(a_{1-D'}, a_{D'}) - U(a_{1-D'}) P(a_{D'})| for one view."""
    if d_prime:
        joint = joint.T
    known = joint.sum(axis=1, keepdims=True)
    return float(np.abs(joint - known / joint.shape[1]).sum())


def pick_branch(joint: np.ndarray, committed: int | None) -> tuple[int, str]:
    if committed is not None:
        return int(committed), "declared"
    return int(joint.sum(axis=0).max() > joint.sum(axis=1).max()), "max-likelihood"


def _rot_alice_trial(cfg: SessionConfig, seed: int, strategy_name: str, trial: int):
    strategy = make_strategy(strategy_name, cfg)
    d = strategy.committed_choice or 0
    result = run_string_rot(cfg, d, SessionRngs.from_seed(seed, cfg.session_id, trial), strategy)
    if result.aborted:
        return None
    amp = result.audit["string-rot"][0]
    leak = result.audit["leaky"][0]
    joint = rot_posterior(cfg, amp["F"], amp["G"], leak["measurements"])
    d_prime, rule = pick_branch(joint, strategy.committed_choice)
    return conditional_rot_distance(joint, d_prime), rule


def audit_rot_security_for_alice(
    cfg: SessionConfig,
    strategy: str = "single-computational",
    trials: int = 200,
    seed: int = 0,
    eps: float | None = None,
    parallel: int = 1,
) -> SecurityReport:
    """Distance of A_{1-D'} from uniform given Bob's whole view.

    With the ROT binding set to ideal, every sender coin is enumerated and the
    distance is exact; otherwise the real privacy-amplified protocol is sampled
    and each trial contributes the exact conditional distance given its view.
    """
    report = SecurityReport("rot-alice", trials=trials, seed=seed)
    if "rot" in cfg.ideal:
        width = cfg.rot_width()
        if width > 4:
            raise FeasibilityError("exhaustive ideal-ROT audit needs width <= 4")
        worst = 0.0
        for d in (0, 1):
            pairs: dict = {}
            for bits in product((0, 1), repeat=2 * width):
                session = _scripted_session(cfg, bits)
                (a0, a1), a_d = rot(session, d)
                key = (a1 if d == 0 else a0, a_d)
                pairs[key] = pairs.get(key, 0.0) + 2.0 ** (-2 * width)
            worst = max(worst, _independence_distance(pairs, 1 << width))
        report.trials = 0
        report.conditions.append(exact_condition("alice-distance", worst, 0.0 if eps is None else eps))
        return report

    if cfg.ell_prime > 8 or cfg.ell > 10:
        raise FeasibilityError("Monte-Carlo ROT audit needs ell' <= 8 and ell <= 10")
    fn = partial(_rot_alice_trial, cfg, seed, strategy)
    results = map_trials(fn, trials, parallel)
    aborted = sum(r is None for r in results)
    done = [r for r in results if r is not None]
    if aborted:
        report.flags.append(f"abort in {aborted} of {trials} sessions")
    if not done:
        report.conditions.append(
            Condition("alice-distance", 0.0, 0.0, "monte-carlo(0)", eps, False, "every session aborted")
        )
        return report
    rules = sorted({rule for _, rule in done})
    cond = mc_condition("alice-distance", [dist for dist, _ in done], eps, note=f"D' rule: {','.join(rules)}")
    report.conditions.append(cond)
    report.details["strategy"] = strategy
    report.details["ci95"] = [cond.estimate - 1.96 * cond.stderr, cond.estimate + 1.96 * cond.stderr]
    return report


# ------------------------------------------------------ ROT security for Bob


def _alice_view(result) -> str:
    """Serialised Alice-side view: her outputs, her own coins and Bob's messages."""
    own = {}
    for key in ("leaky", "string-rot"):
        entries = result.audit.get(key, [])
        own[key] = [{k: v for k, v in e.items() if k != "measurements"} for e in entries]
    sent_by_bob = [e.to_record() for e in result.transcript.events if e.sender == "bob" and e.kind == "message"]
    return json.dumps([encode_payload(result.alice), encode_payload(own), sent_by_bob], sort_keys=True)


def _rot_bob_trial(cfg: SessionConfig, seed: int, trial: int) -> float:
    views = []
    for d in (0, 1):
        rngs = SessionRngs.from_seed(seed, cfg.session_id, trial)
        views.append(_alice_view(run_session(cfg, lambda s, d=d: rot(s, d), rngs)))
    return float(views[0] != views[1])


def audit_rot_security_for_bob(cfg: SessionConfig, trials: int = 100, seed: int = 0, parallel: int = 1) -> SecurityReport:
    """Alice's view coupled across d = 0 and d = 1 on the same seeds; never differs."""
    report = SecurityReport("rot-bob", trials=trials, seed=seed)
    diffs = map_trials(partial(_rot_bob_trial, cfg, seed), trials, parallel)
    report.conditions.append(mc_condition("alice-view-depends-on-d", diffs, 0.0))
    return report


# -------------------------------------------------------------- OT and kOT


def ot_view_joint(cfg: SessionConfig, d: int, a_d: BitString) -> dict:
    """{(a_{1-d}, Bob's view): p} with a_{1-d} uniform and the ROT coins enumerated."""
    width = len(a_d)
    rot_bits = 2 * cfg.rot_width()
    pairs: dict = {}
    weight = 2.0 ** -(width + rot_bits)
    for other in _strings(width):
        a0, a1 = (a_d, other) if d == 0 else (other, a_d)
        for bits in product((0, 1), repeat=rot_bits):
            session = _scripted_session(cfg, bits)
            out = ot_from_rot(session, a0, a1, d)
            msgs = {e.label: e.payload for e in session.transcript.of_kind("message")}
            key = (other, (msgs["Y0"], msgs["Y1"], out))
            pairs[key] = pairs.get(key, 0.0) + weight
    return pairs


def audit_ot(cfg: SessionConfig) -> SecurityReport:
    """Exhaustive one-time-pad check over ideal ROT, plus the NDLF criterion."""
    cfg = SessionConfig.from_dict({**cfg.to_dict(), "ideal": sorted(cfg.ideal | {"rot"})})
    width = cfg.rot_width()
    if width > 3:
        raise FeasibilityError("exhaustive OT audit needs width <= 3")
    report = SecurityReport("ot")
    worst = 0.0
    for d in (0, 1):
        for a_d in _strings(width):
            worst = max(worst, _independence_distance(ot_view_joint(cfg, d, a_d), 1 << width))
    report.conditions.append(exact_condition("bob-view-of-other-input", worst, 0.0))

    # full joint over (A0, A1, Z) for d = 0 with both inputs uniform
    joint: dict = {}
    for a0 in _strings(width):
        for (other, view), p in ot_view_joint(cfg, 0, a0).items():
            key = (a0, other, view)
            joint[key] = joint.get(key, 0.0) + p / (1 << width)
    result = check_obliviousness_reduction(FiniteDistribution(joint), 0.0)
    report.conditions.append(exact_condition("ndlf-criterion", result.worst, result.threshold))
    return report


def kot_view_joint(cfg: SessionConfig, d: int, x_d: BitString) -> dict:
    k = cfg.k
    width = len(x_d)
    n_masks = k - 2 if cfg.kot_variant == "k-1" else k
    mask_bits = n_masks * width
    pairs: dict = {}
    weight = 2.0 ** -(width * (k - 1) + mask_bits)
    for others in product(_strings(width), repeat=k - 1):
        xs = list(others)
        xs.insert(d - 1, x_d)
        for bits in product((0, 1), repeat=mask_bits):
            session = _scripted_session(cfg, bits)
            kot_chain(session, xs, d)
            view = tuple(session.audit["kot"][0]["received"])
            key = (tuple(others), view)
            pairs[key] = pairs.get(key, 0.0) + weight
    return pairs


def audit_kot(cfg: SessionConfig) -> SecurityReport:
    """Exhaustive: the unchosen messages are jointly uniform given Bob's OT outputs."""
    cfg = SessionConfig.from_dict({**cfg.to_dict(), "ideal": sorted(cfg.ideal | {"ot"})})
    width = cfg.ot_width()
    n_masks = cfg.k - 2 if cfg.kot_variant == "k-1" else cfg.k
    work = cfg.k * (1 << width) * 2 ** (width * (cfg.k - 1 + n_masks))
    if work > 1 << 14:
        raise FeasibilityError("exhaustive kOT audit limited to 2^14 sessions")
    report = SecurityReport("kot")
    worst = 0.0
    for d in range(1, cfg.k + 1):
        for x_d in _strings(width):
            worst = max(worst, _independence_distance(kot_view_joint(cfg, d, x_d), 1 << (width * (cfg.k - 1))))
    report.conditions.append(exact_condition("bob-view-of-other-inputs", worst, 0.0))
    return report


# --------------------------------------------------------------------- sROT


def audit_srot(cfg: SessionConfig) -> SecurityReport:
    """Per-index check (asserted) and joint check (informational) over ideal ROTs."""
    cfg = SessionConfig.from_dict({**cfg.to_dict(), "ideal": sorted(cfg.ideal | {"rot"})})
    k = cfg.k
    width = cfg.rot_width()
    rounds = k.bit_length() - 1
    n_bits = 2 * rounds * width
    if n_bits > 12:
        raise FeasibilityError("exhaustive sROT audit needs 2 log2(k) width <= 12")
    weight = 2.0**-n_bits
    per_index = 0.0
    joint_worst = 0.0
    for d in range(1, k + 1):
        singles: dict[int, dict] = {i: {} for i in range(1, k + 1) if i != d}
        joint: dict = {}
        for bits in product((0, 1), repeat=n_bits):
            session = _scripted_session(cfg, bits)
            strings, _ = srot(session, d, k)
            view = tuple(session.audit["srot"][0]["parts"])
            for i, table in singles.items():
                key = (strings[i - 1], view)
                table[key] = table.get(key, 0.0) + weight
            key = (tuple(s for i, s in enumerate(strings, 1) if i != d), view)
            joint[key] = joint.get(key, 0.0) + weight
        for table in singles.values():
            per_index = max(per_index, _independence_distance(table, 1 << width))
        joint_worst = max(joint_worst, _independence_distance(joint, 1 << (width * (k - 1))))
    report = SecurityReport("srot")
    report.conditions.append(exact_condition("per-index", per_index, 0.0))
    report.conditions.append(exact_condition("joint", joint_worst, None, note="informational"))
    return report


# ---------------------------------------------------------------- R^beta


def compute_r_beta(joint: FiniteDistribution, smoothing_event, f: PolyHash, g: PolyHash, beta: NdlFunction) -> float:
    """sum over (s, t) in E of (-1)^beta(F(s), G(t)) P(s, t)."""
    total = []
    for (s, t), p in joint.items():
        if smoothing_event((s, t)):
            total.append(-p if beta(f(s), g(t)) else p)
    return math.fsum(total)


def rxor_distance(joint: FiniteDistribution, smoothing_event, f, g, beta) -> float:
    """|| P_{beta(A0,A1), E} - U || with the event-restricted (subnormalised) bit law."""
    p = [[], []]
    for (s, t), mass in joint.items():
        if smoothing_event((s, t)):
            p[beta(f(s), g(t))].append(mass)
    return abs(math.fsum(p[0]) - 0.5) + abs(math.fsum(p[1]) - 0.5)


def check_rxor_bound(joint: FiniteDistribution, smoothing_event, f, g, beta, eps: float) -> bool:
    p_event = joint.probability(smoothing_event)
    if p_event < 1 - eps - EXACT_TOL:
        raise PreconditionError(f"P(E) = {p_event} is below 1 - eps = {1 - eps}")
    xi = abs(compute_r_beta(joint, smoothing_event, f, g, beta))
    return rxor_distance(joint, smoothing_event, f, g, beta) <= xi + eps + EXACT_TOL


def identity_hash(in_bits: int, out_bits: int) -> PolyHash:
    """h(x) = x, truncated to the low ``out_bits`` bits."""
    return PolyHash(2, in_bits, (0, 1), in_bits, out_bits)


def random_joint(ell: int, rng: np.random.Generator) -> FiniteDistribution:
    strings = _strings(ell)
    weights = rng.dirichlet(np.full(len(strings) ** 2, 0.5))
    return FiniteDistribution(
        {(s, t): float(w) for (s, t), w in zip(product(strings, strings), weights)}
    )


def _rbeta_instance(seed: int, ell: int, ell_prime: int, trial: int):
    rng = party_rng(seed, "auditor", 0, trial)
    joint = random_joint(ell, rng)
    kept = {o for o in sorted(joint.support, key=repr) if rng.random() < 0.9}
    event = kept.__contains__
    eps = 1 - joint.probability(event)
    f = sample_hash(2, ell, ell_prime, rng)
    g = sample_hash(2, ell, ell_prime, rng)
    betas = list(enumerate_ndlfs(ell_prime))
    beta = betas[int(rng.integers(len(betas)))]
    xi = abs(compute_r_beta(joint, event, f, g, beta))
    dist = rxor_distance(joint, event, f, g, beta)
    return check_rxor_bound(joint, event, f, g, beta, eps), dist, xi, eps


def audit_rbeta(trials: int = 100, seed: int = 0, ell: int = 3, ell_prime: int = 2) -> SecurityReport:
    report = SecurityReport("rbeta", trials=trials, seed=seed)
    results = [_rbeta_instance(seed, ell, ell_prime, i) for i in range(trials)]
    failures = sum(not ok for ok, *_ in results)
    report.conditions.append(exact_condition("bound-violations", failures, 0.0))
    slack = min(xi + eps - dist for _, dist, xi, eps in results)
    report.details["min-slack"] = slack

    strings = _strings(ell)
    uniform = FiniteDistribution.uniform(list(product(strings, strings)))
    ident = identity_hash(ell, ell_prime)
    worst = max(
        abs(compute_r_beta(uniform, lambda o: True, ident, ident, beta)) for beta in enumerate_ndlfs(ell_prime)
    )
    report.conditions.append(exact_condition("uniform-r-beta", worst, 0.0))
    return report


# ------------------------------------------------------------- obliviousness


@dataclass
class ObliviousnessResult:
    passed: bool
    threshold: float
    worst: float
    witness: NdlFunction | None
    distances: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed


def check_obliviousness_reduction(joint_view: FiniteDistribution, eps_prime: float) -> ObliviousnessResult:
    """NDLF test over a joint of (A0, A1, Z).

    Passes iff every non-degenerate beta leaves beta(A0, A1) within
    eps'/2^(2l'+1) of a uniform bit independent of Z. The witness is the
    first beta attaining the largest distance.
    """
    a0_any = next(iter(joint_view.support))[0]
    width = len(a0_any)
    if width > 4:
        raise FeasibilityError("NDLF enumeration limited to width <= 4")
    threshold = eps_prime / 2 ** (2 * width + 1)
    z_marg = joint_view.map(lambda o: o[2])
    distances = {}
    worst, witness = 0.0, None
    for beta in enumerate_ndlfs(width):
        masses: dict = {}
        for (a0, a1, z), p in joint_view.items():
            key = (beta(a0, a1), z)
            masses[key] = masses.get(key, 0.0) + p
        dist = math.fsum(
            abs(masses.get((b, z), 0.0) - pz / 2) for z, pz in z_marg.items() for b in (0, 1)
        )
        distances[(beta.u0.to_int(), beta.u1.to_int())] = dist
        if dist > worst + EXACT_TOL:
            worst, witness = dist, beta
    passed = worst <= threshold + EXACT_TOL
    return ObliviousnessResult(passed, threshold, worst, None if passed else witness, distances)


# ----------------------------------------------------------------- ledgers


def epsilon_ledger(composition: str, eps: float, k: int = 2, ell: int = 1) -> float:
    """Composed security parameter for a construction built on eps-secure parts."""
    if k < 2 or ell < 1 or eps < 0:
        raise DomainError("need k >= 2, ell >= 1 and eps >= 0")
    if composition == "srot":
        return eps * math.log2(k)
    if composition == "ident":
        return eps + k * k / 2**ell
    if composition == "ot":
        return eps
    raise DomainError(f"unknown composition {composition!r}")


def prescribed_r(k: int, theta: float, gamma: float = 1.0) -> float:
    """Hash independence 4 (gamma + 1) k^(2 theta) asked for by the asymptotic analysis."""
    return 4 * (gamma + 1) * k ** (2 * theta)


def rot_distance_bound(
    k: int, ell_prime: int, delta0: float, eps0: float, alpha: float, theta: float, gamma: float = 1.0
) -> float:
    """Four-term asymptotic ROT bound at concrete constants; reported, never asserted."""
    return (
        2 ** -(delta0 * k - 2 * (ell_prime + 1))
        + 2 ** -(eps0 * k - 2 * ell_prime + 3)
        + 2 ** -(alpha / 2 * k - 2 * (ell_prime + 1))
        + 2 ** -(alpha / 2 * k - 2 * (ell_prime + 2 + theta * math.log(k)) - math.log(gamma + 1))
    )


# ---------------------------------------------------------- large deviation


def tail_bound(matrix_a: np.ndarray, t: int, lam: float) -> float:
    """Right-hand side of the quadratic-form tail bound for 2t-wise independent signs."""
    at = np.abs(matrix_a)
    fro2 = float((at**2).sum())
    spectral = float(np.linalg.norm(at, 2))
    first = 4 * math.exp(1 / (6 * t)) * math.sqrt(math.pi * t) * (4 * fro2 * t / (math.e * lam**2)) ** (t / 2)
    second = 4 * math.exp(1 / (12 * t)) * math.sqrt(2 * math.pi * t) * (8 * spectral**2 * t / (math.e * lam)) ** t
    return first + second


def sample_quadratic_form(matrix_a: np.ndarray, t: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Draws of S = sum A_xy (sigma_x sigma_y - delta_xy) with 2t-wise independent signs."""
    n = matrix_a.shape[0]
    a = max(1, (n - 1).bit_length())
    table = mul_table(a)
    coeffs = rng.integers(0, 1 << a, size=(trials, 2 * t))
    xs = np.arange(n)
    acc = np.zeros((trials, n), dtype=np.int64)
    for j in range(2 * t):
        acc = table[acc, xs[None, :]] ^ coeffs[:, [j]]
    sigma = 1 - 2 * (acc & 1)
    return np.einsum("ti,ij,tj->t", sigma, matrix_a, sigma) - np.trace(matrix_a)


def check_large_deviation(
    matrix_a, t: int = 4, lambdas=None, trials: int = 10_000, seed: int = 0
) -> SecurityReport:
    matrix_a = np.asarray(matrix_a, dtype=float)
    if matrix_a.ndim != 2 or matrix_a.shape[0] != matrix_a.shape[1] or not np.allclose(matrix_a, matrix_a.T):
        raise DomainError("matrix must be square and symmetric")
    if t < 2 or t % 2:
        raise DomainError("t must be an even integer >= 2")
    if matrix_a.shape[0] > 64:
        raise FeasibilityError("large-deviation check limited to N <= 64")
    fro = float(np.linalg.norm(np.abs(matrix_a)))
    if lambdas is None:
        lambdas = [m * max(fro, 1.0) for m in (1, 2, 3, 4, 6)]
    rng = party_rng(seed, "auditor")
    s = sample_quadratic_form(matrix_a, t, trials, rng)
    report = SecurityReport("large-deviation", trials=trials, seed=seed)
    mean = math.fsum(s) / trials
    se = float(s.std(ddof=1) / math.sqrt(trials))
    report.conditions.append(
        Condition("mean-S", mean, se, f"monte-carlo({trials})", 0.0, abs(mean) <= SIGMA_MARGIN * se + 1e-9)
    )
    for lam in lambdas:
        hits = (np.abs(s) >= lam).astype(float)
        report.conditions.append(mc_condition(f"tail@{lam:.4g}", hits, tail_bound(matrix_a, t, lam)))
    return report


def random_symmetric(n: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.uniform(-1, 1, size=(n, n))
    return (m + m.T) / 2


def audit_large_deviation(n: int = 16, t: int = 4, trials: int = 10_000, seed: int = 0, matrices: int = 1) -> SecurityReport:
    report = SecurityReport("large-deviation", trials=trials, seed=seed)
    for m in range(matrices):
        a = random_symmetric(n, party_rng(seed, "auditor", 1, m))
        sub = check_large_deviation(a, t, trials=trials, seed=seed * 1000 + m)
        for c in sub.conditions:
            c.name = f"matrix{m}:{c.name}"
            report.conditions.append(c)
    return report


# ------------------------------------------------------------ identification


def ident_reply(strings, h: PolyHash, w: int) -> BitString:
    return strings[w - 1] ^ eval_index_hash(h, w)


def extract_w_prime(strings, h: PolyHash, z: BitString):
    """Unique i with z == S_i xor h(i); None when no index or several match."""
    hits = [i for i in range(1, len(strings) + 1) if ident_reply(strings, h, i) == z]
    return hits[0] if len(hits) == 1 else None


def _alice_z(strategy: str, strings, h, rng, ell: int, k: int) -> BitString:
    if strategy == "junk":
        return BitString.random(ell, rng)
    if strategy == "guess":
        return ident_reply(strings, h, int(rng.integers(1, k + 1)))
    raise DomainError(f"unknown Alice strategy {strategy!r}")


def _password(dist: FiniteDistribution | None, k: int, rng) -> int:
    if dist is None:
        return int(rng.integers(1, k + 1))
    outcomes = sorted(dist.support)
    return int(outcomes[int(rng.choice(len(outcomes), p=[dist[o] for o in outcomes]))])


def ident_alice_trial(k: int, ell: int, seed: int, strategy: str, passwords, trial: int):
    """One session against a dishonest Alice; returns (accepted, W' != W_B)."""
    rngs = SessionRngs.from_seed(seed, 0, trial)
    aud = party_rng(seed, "auditor", 0, trial)
    w_b = _password(passwords, k, aud)
    strings, s_d = ideal_krot(rngs.alice, ell, k, w_b)
    h = sample_hash(2, index_hash_bits(k), ell, rngs.bob)
    z = _alice_z(strategy, strings, h, aud, ell, k)
    accepted = int(z == s_d ^ eval_index_hash(h, w_b))
    return accepted, extract_w_prime(strings, h, z) != w_b


def ident_alice_exact(k: int, ell: int, strategy: str = "junk") -> tuple[float, float]:
    """Exact (P[G=1], P[G=1 and W' != W_B]) by enumeration, uniform W_B."""
    if k * ell + 2 * max(index_hash_bits(k), ell) + ell > 14:
        raise FeasibilityError("exact identification enumeration too large")
    a = max(index_hash_bits(k), ell)
    strings_space = list(product(_strings(ell), repeat=k))
    hashes = [PolyHash(2, a, c, index_hash_bits(k), ell) for c in product(range(1 << a), repeat=2)]
    acc, bad = [], []
    norm = 1.0 / (len(strings_space) * len(hashes) * k)
    for strings in strings_space:
        for h in hashes:
            if strategy == "junk":
                zs = [(z, 1.0 / (1 << ell)) for z in _strings(ell)]
            else:
                zs = [(ident_reply(strings, h, w), 1.0 / k) for w in range(1, k + 1)]
            for z, pz in zs:
                w_prime = extract_w_prime(strings, h, z)
                for w_b in range(1, k + 1):
                    if z == ident_reply(strings, h, w_b):
                        acc.append(pz * norm)
                        if w_prime != w_b:
                            bad.append(pz * norm)
    return math.fsum(acc), math.fsum(bad)


def ident_bob_exhaustive(k: int, ell: int, w_guess: int, h: PolyHash) -> float:
    """Distance of (W_A, view) from P(W_A) x P(view), conditioned on W_A != w'.

    Bob commits to D' = w'; his view is (S_{w'}, h, z) under an ideal kROT.
    """
    pairs: dict = {}
    others = [w for w in range(1, k + 1) if w != w_guess]
    weight = 1.0 / (len(others) * 4**ell)
    for w_a in others:
        for s_guess in _strings(ell):
            for s_a in _strings(ell):
                strings = [BitString.zeros(ell)] * k
                strings[w_guess - 1] = s_guess
                strings[w_a - 1] = s_a
                key = (w_a, (s_guess, ident_reply(strings, h, w_a)))
                pairs[key] = pairs.get(key, 0.0) + weight
    return _independence_distance(pairs, len(others))


def audit_identification(
    k: int = 4,
    ell: int = 8,
    trials: int = 10_000,
    seed: int = 0,
    strategy: str = "junk",
    passwords: FiniteDistribution | None = None,
    eps: float = 0.0,
    parallel: int = 1,
) -> SecurityReport:
    if k > 8 or ell > 10:
        raise FeasibilityError("identification audit needs k <= 8 and ell <= 10")
    report = SecurityReport("ident", trials=trials, seed=seed)
    bound = epsilon_ledger("ident", eps, k, ell)
    report.ledger = {"claimed": eps, "composed": bound}
    if passwords is not None and min_entropy(passwords) < 1:
        report.flags.append("password min-entropy below 1: identification hypothesis fails")

    fn = partial(ident_alice_trial, k, ell, seed, strategy, passwords)
    results = map_trials(fn, trials, parallel)
    accepted = [float(a) for a, _ in results]
    mismatched = [(a, bad) for a, bad in results if bad]
    report.conditions.append(mc_condition("alice-accept-rate", accepted, bound))
    if mismatched:
        report.conditions.append(
            mc_condition("alice-accept-given-mismatch", [float(a) for a, _ in mismatched], bound)
        )
    report.ledger["empirical"] = report.conditions[0].estimate

    small_ell = min(ell, 3)
    h = sample_hash(2, index_hash_bits(k), small_ell, party_rng(seed, "bob"))
    dist = max(ident_bob_exhaustive(k, small_ell, w, h) for w in range(1, k + 1))
    report.conditions.append(exact_condition("bob-view-given-wrong-guess", dist, 0.0, note=f"ell={small_ell}"))
    report.details["strategy"] = strategy
    return report


AUDITS = ("rot-alice", "rot-bob", "ot", "kot", "srot", "ident", "rbeta", "large-deviation")
