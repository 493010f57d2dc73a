"""Dishonest-party strategies.

Receiver strategies plug into the session engine and can only issue
single-qubit measurements. The identification attack forces an honest verifier
of any non-interactive scheme to accept every password, once the scheme's choice
function is injective and an accepting input exists for every (password, y).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Sequence

import numpy as np

from .bitmath import BitString, FiniteDistribution
from .errors import AttackInapplicable, DomainError
from .hashing import PolyHash, eval_index_hash, index_hash_bits, sample_hash
from .protocols.engine import Measure, Output, ReceiverView, SingleBasisBob, Strategy
from .quantum import Basis

# ------------------------------------------------------- receiver strategies


def dishonest_bob_single_basis(basis: Basis) -> SingleBasisBob:
    return SingleBasisBob(Basis(basis))


class DelayedBob(Strategy):
    """Hold every qubit, then measure with bases chosen from the whole view.

    ``plan(view)`` is called once, after all classical messages of the
    sub-protocol have arrived, and returns one basis per qubit; ``None`` leaves
    that qubit unmeasured (which the engine turns into an abort). The output is
    the raw outcome string.
    """

    def __init__(self, plan: Callable[[ReceiverView], Sequence[Basis | None]], committed_choice=None):
        self.plan = plan
        self.committed_choice = committed_choice
        self._bases: list | None = None

    def decide(self, view: ReceiverView):
        if self._bases is None:
            self._bases = list(self.plan(view))
            if len(self._bases) != view.n_qubits:
                raise DomainError("plan must give one entry per qubit")
        for index in view.unmeasured:
            basis = self._bases[index]
            if basis is not None:
                return Measure(index, Basis(basis))
        return Output(view.outcome_string())


def dishonest_bob_delayed(plan, committed_choice: int | None = None) -> DelayedBob:
    return DelayedBob(plan, committed_choice)


def alternating_plan(block_bits: int):
    """Bases alternate block by block, starting with the computational basis."""

    def plan(view: ReceiverView):
        return [Basis((i // block_bits) % 2) for i in range(view.n_qubits)]

    return plan


def half_measured_plan(view: ReceiverView):
    """Measures only the first half of the qubits (violates the boundary rule)."""
    half = view.n_qubits // 2
    return [Basis.COMPUTATIONAL if i < half else None for i in range(view.n_qubits)]


def hash_keyed_plan(view: ReceiverView):
    """One basis for every qubit, picked from the low bit of F's constant term."""
    basis = Basis(view.messages["F"].coefficients[0] & 1)
    return [basis] * view.n_qubits


# ------------------------------------------------ non-interactive identification


@dataclass
class NonInteractiveIdScheme:
    """One-shot identification through a single k-OT plus a side message y.

    ``sampler(w)`` is the joint distribution of ((X_1, ..., X_k), y) for Alice's
    password w; ``choice_fn(w, y)`` is Bob's slot in 1..k and
    ``accept_fn(w, x, y)`` his acceptance bit.
    """

    k: int
    x_domain: tuple
    sampler: Callable[[int], FiniteDistribution]
    choice_fn: Callable[[int, Any], int]
    accept_fn: Callable[[int, Any, Any], int]
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def joint(self, w: int) -> FiniteDistribution:
        if w not in self._cache:
            self._cache[w] = self.sampler(w)
        return self._cache[w]

    def y_support(self) -> list:
        if "y" not in self._cache:
            ys = set()
            for w in range(1, self.k + 1):
                ys.update(y for (_, y) in self.joint(w).mass)
            self._cache["y"] = sorted(ys, key=repr)
        return self._cache["y"]

    def slot_support(self, w: int, y, j: int) -> set:
        """Values x with P(X_j = x | W_A = w, Y = y) > 0."""
        return {xs[j - 1] for (xs, yy) in self.joint(w).support if yy == y}


def injectivity_witness(scheme: NonInteractiveIdScheme):
    """(y, w1, w2) with c(w1, y) == c(w2, y), or None."""
    for y in scheme.y_support():
        seen: dict[int, int] = {}
        for w in range(1, scheme.k + 1):
            j = scheme.choice_fn(w, y)
            if j in seen:
                return y, seen[j], w
            seen[j] = w
    return None


def check_injectivity(scheme: NonInteractiveIdScheme) -> bool:
    return injectivity_witness(scheme) is None


def accepting_input_witness(scheme: NonInteractiveIdScheme):
    """(w, y) admitting no accepting x, or None."""
    for y in scheme.y_support():
        for w in range(1, scheme.k + 1):
            if not any(scheme.accept_fn(w, x, y) for x in scheme.x_domain):
                return w, y
    return None


def check_accepting_input_exists(scheme: NonInteractiveIdScheme) -> bool:
    return accepting_input_witness(scheme) is None


@dataclass
class AttackResult:
    forced_inputs: list
    y: Any
    acceptance: dict[int, int]

    @property
    def success(self) -> bool:
        return all(self.acceptance.values())


def _sample(dist: FiniteDistribution, rng: np.random.Generator):
    outcomes = sorted(dist.support, key=repr)
    probs = np.array([dist[o] for o in outcomes])
    return outcomes[int(rng.choice(len(outcomes), p=probs / probs.sum()))]


def forge_inputs(scheme: NonInteractiveIdScheme, rng: np.random.Generator):
    """Dishonest Alice's message y and k-OT inputs; never looks at Bob's password."""
    witness = injectivity_witness(scheme)
    if witness is not None:
        y, w1, w2 = witness
        raise AttackInapplicable("injectivity", f"c({w1}, {y!r}) == c({w2}, {y!r})")
    witness = accepting_input_witness(scheme)
    if witness is not None:
        w, y = witness
        raise AttackInapplicable("accepting input existence", f"no x accepted for w={w}, y={y!r}")

    y = _sample(scheme.joint(1).map(lambda o: o[1]), rng)
    forced: list = [None] * scheme.k
    for w in range(1, scheme.k + 1):
        j = scheme.choice_fn(w, y)
        accepted = [x for x in scheme.x_domain if scheme.accept_fn(w, x, y)]
        support = scheme.slot_support(w, y, j)
        preferred = [x for x in accepted if x in support]
        forced[j - 1] = (preferred or accepted)[0]
    filler = scheme.x_domain[0]
    return [filler if x is None else x for x in forced], y


def attack_non_interactive_id(scheme: NonInteractiveIdScheme, rng: np.random.Generator) -> AttackResult:
    forced, y = forge_inputs(scheme, rng)
    # Bob's password is only ranged over after the inputs are fixed.
    acceptance = {
        w_b: int(scheme.accept_fn(w_b, forced[scheme.choice_fn(w_b, y) - 1], y))
        for w_b in range(1, scheme.k + 1)
    }
    return AttackResult(forced, y, acceptance)


# ------------------------------------------------------------ scheme builders


def _all_strings(bits: int) -> tuple[BitString, ...]:
    return tuple(BitString.from_int(v, bits) for v in range(1 << bits))


def fixed_hash_scheme(k: int, ell: int, h: PolyHash) -> NonInteractiveIdScheme:
    """Password identification over a k-OT with the hash published in advance.

    Alice's k-OT inputs are uniform strings and y = X_{w} xor h(w); Bob reads
    slot w and accepts iff y == X_w xor h(w).
    """
    if k * ell > 14:
        raise DomainError("fixed-hash scheme enumeration limited to k*ell <= 14")
    domain = _all_strings(ell)

    def sampler(w):
        mass = 1.0 / len(domain) ** k
        pad = eval_index_hash(h, w)
        return FiniteDistribution({(xs, xs[w - 1] ^ pad): mass for xs in product(domain, repeat=k)})

    return NonInteractiveIdScheme(
        k=k,
        x_domain=domain,
        sampler=sampler,
        choice_fn=lambda w, y: w,
        accept_fn=lambda w, x, y: int(y == x ^ eval_index_hash(h, w)),
        name="fixed-hash",
    )


def sample_fixed_hash_scheme(k: int, ell: int, rng: np.random.Generator) -> NonInteractiveIdScheme:
    return fixed_hash_scheme(k, ell, sample_hash(2, index_hash_bits(k), ell, rng))


def codebook_scheme(k: int, y_size: int, x_bits: int, rng: np.random.Generator) -> NonInteractiveIdScheme:
    """Y uniform; password w's codeword for y sits in slot perm_y(w).

    Bob accepts iff the slot he reads equals the published codeword.
    """
    if (1 << x_bits) ** (k - 1) * y_size > 1 << 14:
        raise DomainError("codebook scheme too large to enumerate")
    domain = _all_strings(x_bits)
    perms = {y: [int(p) + 1 for p in rng.permutation(k)] for y in range(y_size)}
    book = {(w, y): domain[int(rng.integers(len(domain)))] for w in range(1, k + 1) for y in range(y_size)}

    def sampler(w):
        mass: dict = {}
        p = 1.0 / (y_size * len(domain) ** (k - 1))
        for y in range(y_size):
            slot = perms[y][w - 1]
            for rest in product(domain, repeat=k - 1):
                xs = list(rest)
                xs.insert(slot - 1, book[(w, y)])
                key = (tuple(xs), y)
                mass[key] = mass.get(key, 0.0) + p
        return FiniteDistribution(mass)

    return NonInteractiveIdScheme(
        k=k,
        x_domain=domain,
        sampler=sampler,
        choice_fn=lambda w, y: perms[y][w - 1],
        accept_fn=lambda w, x, y: int(x == book[(w, y)]),
        name="codebook",
    )


def constant_choice_scheme(k: int, ell: int = 1) -> NonInteractiveIdScheme:
    """Bob always reads slot 1 (non-injective for k >= 2)."""
    domain = _all_strings(ell)

    def sampler(w):
        return FiniteDistribution.uniform([((x,) * k, x) for x in domain])

    return NonInteractiveIdScheme(
        k, domain, sampler, lambda w, y: 1, lambda w, x, y: int(x == y), name="constant-choice"
    )


def reject_all_scheme(k: int, ell: int = 1) -> NonInteractiveIdScheme:
    domain = _all_strings(ell)

    def sampler(w):
        return FiniteDistribution.uniform([((x,) * k, x) for x in domain])

    return NonInteractiveIdScheme(
        k, domain, sampler, lambda w, y: w, lambda w, x, y: 0, name="reject-all"
    )


def random_scheme(rng: np.random.Generator) -> NonInteractiveIdScheme:
    """A seeded correct scheme with injective choice function, k <= 8."""
    if rng.integers(2):
        k = int(rng.choice([2, 3, 4, 6, 7]))
        ell = {2: 4, 3: 3, 4: 2, 6: 2, 7: 2}[k]
        return sample_fixed_hash_scheme(k, ell, rng)
    k = int(rng.integers(2, 9))
    x_bits = 2 if k <= 5 else 1
    return codebook_scheme(k, int(rng.integers(1, 4)), x_bits, rng)


def scheme_from_dict(spec: dict) -> NonInteractiveIdScheme:
    kind = spec.get("kind")
    k = int(spec.get("k", 4))
    rng = np.random.default_rng(int(spec.get("seed", 0)))
    if kind == "fixed-hash":
        return sample_fixed_hash_scheme(k, int(spec.get("ell", 2)), rng)
    if kind == "codebook":
        return codebook_scheme(k, int(spec.get("y_size", 2)), int(spec.get("x_bits", 1)), rng)
    if kind == "constant-choice":
        return constant_choice_scheme(k)
    if kind == "reject-all":
        return reject_all_scheme(k)
    raise DomainError(f"unknown scheme kind {kind!r}")
