"""GA-driven synthesis of gate sequences approximating unitary targets.

A genome is a fixed-length tuple of genes ``(kind_id, a, b, angle)``; one
gene per budgeted gate. The gate budget is a list of resource classes
(e.g. one CPHASE plus two single-qubit rotations); crossover and mutation
keep the per-class gate counts exact via a repair pass, so a synthesized
circuit never exceeds its budget.

Two problem flavours:

* ``SynthesisProblem`` - approximate one local block target U_j, fitness
  R = ||U_j - W||.
* ``ChainProblem`` - optimise all block circuits of a spin chain jointly
  against the exact evolution exp(-iHt), which is what the Trotter
  comparison experiment runs. Per-block budgets are unchanged, so the
  total gate count still beats the per-step Trotter reference counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ga
from .gates import cnot, cphase, rotation
from .linalg import (
    embed_gate,
    mat_norm,
    phase_aligned,
    phase_invariant_distance,
)
from .models import (
    ModelSpec,
    TrotterPlan,
    block_targets,
    chain_blocks,
    exact_evolution,
    step_from_block_unitaries,
    trotter_evolution,
)


class InvalidGeneError(ValueError):
    """A gene does not decode to a gate on the given qubit register."""


# template name -> (qubit arity, takes an angle)
TEMPLATES = {
    "rx": (1, True),
    "ry": (1, True),
    "rz": (1, True),
    "cphase": (2, True),
    "cnot": (2, False),
    "id": (1, False),
}

TWO_QUBIT = tuple(n for n, (arity, _) in TEMPLATES.items() if arity == 2)


@dataclass(frozen=True)
class GateClass:
    """A budget line: ``count`` gates drawn from the listed templates."""

    name: str
    count: int
    templates: tuple[str, ...]


def block_budget(model: str) -> tuple[GateClass, ...]:
    """Per-block gate budget used by the chain experiments: one CPHASE and
    two (Ising) or four (Heisenberg) single-qubit rotations."""
    singles = 2 if model == "ising" else 4
    return (
        GateClass("cphase", 1, ("cphase",)),
        GateClass("single", singles, ("rx", "ry", "rz")),
    )


def gate_matrix(name: str, angle: float) -> np.ndarray | None:
    if name in ("rx", "ry", "rz"):
        return rotation(name[1], angle)
    if name == "cphase":
        return cphase(angle)
    if name == "cnot":
        return cnot()
    if name == "id":
        return None
    raise InvalidGeneError(f"unknown gate template {name!r}")


class CircuitSpace:
    """Genome space for gate sequences on ``num_qubits`` qubits.

    ``classes`` fixes the per-class gate counts; ``pairs`` and ``singles``
    restrict where two-qubit and single-qubit gates may act (defaults: all
    ordered pairs, all qubits).
    """

    def __init__(self, num_qubits, classes, pairs=None, singles=None):
        self.num_qubits = num_qubits
        self.classes = tuple(classes)
        self.templates = []
        self.template_class = []
        for ci, cls in enumerate(self.classes):
            for name in cls.templates:
                if name not in TEMPLATES:
                    raise InvalidGeneError(f"unknown gate template {name!r}")
                self.templates.append(name)
                self.template_class.append(ci)
        self.templates = tuple(self.templates)
        self.length = sum(cls.count for cls in self.classes)
        self.pairs = tuple(
            pairs
            if pairs is not None
            else [(i, j) for i in range(num_qubits) for j in range(num_qubits) if i != j]
        )
        self.singles = tuple(singles if singles is not None else range(num_qubits))
        self._kinds_of_class = [
            [k for k, ci in enumerate(self.template_class) if ci == c]
            for c in range(len(self.classes))
        ]

    def random_gene(self, class_idx: int, rng) -> tuple:
        kinds = self._kinds_of_class[class_idx]
        kind = kinds[rng.integers(len(kinds))]
        name = self.templates[kind]
        arity, has_angle = TEMPLATES[name]
        if arity == 2:
            a, b = self.pairs[rng.integers(len(self.pairs))]
        else:
            a, b = int(self.singles[rng.integers(len(self.singles))]), -1
        angle = float(rng.uniform(0.0, 2 * np.pi)) if has_angle else 0.0
        return (kind, int(a), int(b), angle)

    def random_genome(self, rng) -> tuple:
        layout = [c for c, cls in enumerate(self.classes) for _ in range(cls.count)]
        layout = [layout[i] for i in rng.permutation(len(layout))]
        return tuple(self.random_gene(c, rng) for c in layout)

    def repair(self, genes: tuple, rng) -> tuple:
        """Restore exact per-class counts after crossover or mutation.

        Scanning left to right, genes beyond their class capacity are
        redrawn in a class with room left (chosen with probability
        proportional to the remaining capacity).
        """
        capacity = [cls.count for cls in self.classes]
        out = list(genes)
        overflow = []
        for i, gene in enumerate(genes):
            ci = self.template_class[gene[0]]
            if capacity[ci] > 0:
                capacity[ci] -= 1
            else:
                overflow.append(i)
        for i in overflow:
            choices = [c for c, cap in enumerate(capacity) for _ in range(cap)]
            ci = choices[rng.integers(len(choices))]
            capacity[ci] -= 1
            out[i] = self.random_gene(ci, rng)
        return tuple(out)

    def crossover(self, first, second, w_first, w_second, rng) -> tuple:
        return self.repair(ga.block_crossover(first, second, w_first, w_second), rng)

    def mutate(self, genome, rate, rng) -> tuple:
        """Span replacement plus Gaussian angle jitter, then count repair.

        With probability ``rate`` a random contiguous gene span is replaced
        by fresh random genes; independently, each angle gene is jittered
        by N(0, 0.1^2) rad with the same rate.
        """
        genes = list(genome)
        if rate > 0 and rng.random() < rate:
            start = int(rng.integers(len(genes)))
            span = 1 + int(rng.integers(len(genes) - start))
            layout = [c for c, cls in enumerate(self.classes) for _ in range(cls.count)]
            for i in range(start, start + span):
                genes[i] = self.random_gene(layout[rng.integers(len(layout))], rng)
        for i, (kind, a, b, angle) in enumerate(genes):
            if TEMPLATES[self.templates[kind]][1] and rate > 0 and rng.random() < rate:
                genes[i] = (kind, a, b, float((angle + rng.normal(0.0, 0.1)) % (2 * np.pi)))
        return self.repair(tuple(genes), rng)

    def gate_counts(self, genome) -> dict[str, int]:
        counts = {cls.name: 0 for cls in self.classes}
        for gene in genome:
            counts[self.classes[self.template_class[gene[0]]].name] += 1
        return counts

    def circuit(self, genome) -> list[dict]:
        """JSON-friendly gate list, gene 0 first in time."""
        out = []
        for kind, a, b, angle in genome:
            name = self.templates[kind]
            arity, has_angle = TEMPLATES[name]
            out.append(
                {
                    "kind": name,
                    "qubits": [a] if arity == 1 else [a, b],
                    "angle": angle if has_angle else None,
                }
            )
        return out


def decode_circuit(genome, num_qubits: int, templates) -> np.ndarray:
    """Unitary of a gene sequence; gene 0 acts first in time.

    ``templates`` maps each gene's kind_id to a template name (a
    CircuitSpace's ``templates`` tuple, or any sequence of names).
    """
    dim = 2**num_qubits
    u = np.eye(dim, dtype=complex)
    for kind, a, b, angle in genome:
        if not 0 <= kind < len(templates):
            raise InvalidGeneError(f"kind_id {kind} out of range")
        name = templates[kind]
        g = gate_matrix(name, angle)
        if g is None:
            continue
        arity = TEMPLATES[name][0]
        targets = [a] if arity == 1 else [a, b]
        if arity == 2 and a == b:
            raise InvalidGeneError("two-qubit gene with identical qubits")
        u = embed_gate(g, targets, num_qubits) @ u
    return u


@dataclass(frozen=True)
class SynthesisProblem:
    """Approximate one target unitary with a budgeted gate sequence."""

    target: np.ndarray
    space: CircuitSpace
    norm: str = "fro"
    phase_invariant: bool = False

    def random_genome(self, rng):
        return self.space.random_genome(rng)

    def crossover(self, first, second, w_first, w_second, rng):
        return self.space.crossover(first, second, w_first, w_second, rng)

    def mutate(self, genome, rate, rng):
        return self.space.mutate(genome, rate, rng)

    def decode(self, genome) -> np.ndarray:
        return decode_circuit(genome, self.space.num_qubits, self.space.templates)

    def fitness(self, genome) -> float:
        w = self.decode(genome)
        if self.phase_invariant:
            return phase_invariant_distance(self.target, w, self.norm)
        return mat_norm(self.target - w, self.norm)


@dataclass
class SynthesisResult:
    circuit: list
    w: np.ndarray
    residual: float
    eta_matrix: np.ndarray
    gate_counts: dict
    generations: int = 0

    @classmethod
    def from_genome(cls, problem: SynthesisProblem, genome, generations=0):
        w = problem.decode(genome)
        if problem.phase_invariant:
            w = phase_aligned(problem.target, w)
        eta = w - problem.target
        return cls(
            circuit=problem.space.circuit(genome),
            w=w,
            residual=mat_norm(eta, problem.norm),
            eta_matrix=eta,
            gate_counts=problem.space.gate_counts(genome),
            generations=generations,
        )


def synthesize_block(problem: SynthesisProblem, config: ga.GaConfig) -> SynthesisResult:
    """Evolve a gate sequence for one block target; returns the best found."""
    result = ga.evolve(problem, config)
    return SynthesisResult.from_genome(problem, result.best.genome, result.generations)


@dataclass
class ChainProblem:
    """Joint synthesis of all block circuits against the exact chain dynamics.

    With ``share_interior`` (the default for uniform chains) every interior
    block reuses one circuit segment and only the final block, which also
    carries the last qubit's field term, gets its own; otherwise each block
    owns a segment.
    """

    spec: ModelSpec
    plan: TrotterPlan
    norm: str = "fro"
    share_interior: bool = True

    def __post_init__(self):
        self.blocks = chain_blocks(self.spec, self.plan)
        self.u_ideal = exact_evolution(self.spec, self.plan.time)
        budget = block_budget(self.spec.model)
        alpha = len(self.blocks)
        if self.share_interior and alpha > 1:
            self.segment_of_block = [0] * (alpha - 1) + [1]
        else:
            self.segment_of_block = list(range(alpha))
        n_segments = max(self.segment_of_block) + 1
        self.spaces = []
        for s in range(n_segments):
            width = self.blocks[self.segment_of_block.index(s)].width
            self.spaces.append(CircuitSpace(width, budget))
        self._bounds = np.cumsum([0] + [sp.length for sp in self.spaces])

    def segments(self, genome):
        return [
            genome[self._bounds[s] : self._bounds[s + 1]]
            for s in range(len(self.spaces))
        ]

    def random_genome(self, rng):
        genome = ()
        for space in self.spaces:
            genome += space.random_genome(rng)
        return genome

    def crossover(self, first, second, w_first, w_second, rng):
        child = ga.block_crossover(first, second, w_first, w_second)
        parts = []
        for space, seg in zip(self.spaces, self.segments(child)):
            parts.append(space.repair(seg, rng))
        return tuple(g for part in parts for g in part)

    def mutate(self, genome, rate, rng):
        parts = []
        for space, seg in zip(self.spaces, self.segments(genome)):
            parts.append(space.mutate(seg, rate, rng))
        return tuple(g for part in parts for g in part)

    def block_unitaries(self, genome) -> list[np.ndarray]:
        segs = self.segments(genome)
        decoded = [
            decode_circuit(seg, space.num_qubits, space.templates)
            for space, seg in zip(self.spaces, segs)
        ]
        return [decoded[s] for s in self.segment_of_block]

    def evolution(self, genome) -> np.ndarray:
        step = step_from_block_unitaries(
            self.block_unitaries(genome), self.blocks, self.spec.n_spins
        )
        if self.plan.steps == 1:
            return step
        return np.linalg.matrix_power(step, self.plan.steps)

    def fitness(self, genome) -> float:
        return phase_invariant_distance(self.u_ideal, self.evolution(genome), self.norm)

    def total_gate_counts(self, genome) -> dict[str, int]:
        counts: dict[str, int] = {}
        segs = self.segments(genome)
        for s in self.segment_of_block:
            for name, c in self.spaces[s].gate_counts(segs[s]).items():
                counts[name] = counts.get(name, 0) + c
        return counts


@dataclass
class AssembledEvolution:
    u_ga: np.ndarray
    u_t: np.ndarray
    u_i: np.ndarray
    xi: float  # ||U_I - U_GA||
    state_error: float  # E on |0...0>
    trotter_error: float = 0.0  # ||U_I - U_T||
    ga_vs_trotter: float = 0.0  # ||U_T - U_GA||


def state_error(u_ref: np.ndarray, u_approx: np.ndarray) -> float:
    """E = 1 - |<0...0| u_ref^dag u_approx |0...0>|^2."""
    amp = np.vdot(u_ref[:, 0], u_approx[:, 0])
    return max(0.0, 1.0 - abs(amp) ** 2)


def assemble_uga(results, spec: ModelSpec, plan: TrotterPlan, norm: str = "fro") -> AssembledEvolution:
    """Assemble U_GA from per-block synthesis results and score it.

    ``results`` holds one SynthesisResult per block, or a single result
    reused for every block of a uniform chain.
    """
    blocks = chain_blocks(spec, plan)
    if len(results) == 1:
        results = list(results) * len(blocks)
    if len(results) != len(blocks):
        raise ValueError(f"need {len(blocks)} block results, got {len(results)}")
    step = step_from_block_unitaries([r.w for r in results], blocks, spec.n_spins)
    u_ga = np.linalg.matrix_power(step, plan.steps)
    u_t = trotter_evolution(spec, plan)
    u_i = exact_evolution(spec, plan.time)
    return AssembledEvolution(
        u_ga=u_ga,
        u_t=u_t,
        u_i=u_i,
        xi=mat_norm(u_i - u_ga, norm),
        state_error=state_error(u_i, u_ga),
        trotter_error=mat_norm(u_i - u_t, norm),
        ga_vs_trotter=mat_norm(u_t - u_ga, norm),
    )


def synthesize_chain(
    spec: ModelSpec,
    plan: TrotterPlan,
    config: ga.GaConfig,
    restarts: int = 1,
    norm: str = "fro",
    share_interior: bool = True,
):
    """Best-of-``restarts`` chain synthesis; returns (problem, genome, fitness)."""
    problem = ChainProblem(spec, plan, norm=norm, share_interior=share_interior)
    best_genome, best_fit = None, np.inf
    for r in range(restarts):
        cfg = ga.with_seed(config, ga.seed_tuple(config.seed) + (r,))
        res = ga.evolve(problem, cfg)
        if res.best.fitness < best_fit:
            best_genome, best_fit = res.best.genome, res.best.fitness
    return problem, best_genome, best_fit


def compare_with_trotter(
    spec: ModelSpec,
    t_grid,
    config: ga.GaConfig,
    block_size: int = 2,
    restarts: int = 1,
    norm: str = "fro",
    share_interior: bool = True,
):
    """Rows (t, E_trotter_l1, E_trotter_l2, E_ga, cphase_ga, single_ga).

    The GA runs one Trotter step's worth of blocked gates (fewer gates than
    the reference single-step decomposition) against the ideal dynamics.
    """
    rows = []
    circuits = []
    for t in t_grid:
        e_trott = {}
        for l in (1, 2):
            plan = TrotterPlan(time=t, steps=l, block_size=block_size)
            u_i = exact_evolution(spec, t)
            e_trott[l] = state_error(u_i, trotter_evolution(spec, plan))
        plan = TrotterPlan(time=t, steps=1, block_size=block_size)
        problem, genome, _ = synthesize_chain(
            spec, plan, config, restarts=restarts, norm=norm, share_interior=share_interior
        )
        e_ga = state_error(problem.u_ideal, problem.evolution(genome))
        counts = problem.total_gate_counts(genome)
        rows.append(
            {
                "t": t,
                "e_trotter_l1": e_trott[1],
                "e_trotter_l2": e_trott[2],
                "e_ga": e_ga,
                "cphase_ga": counts.get("cphase", 0),
                "single_ga": counts.get("single", 0),
            }
        )
        circuits.append(
            {
                "t": t,
                "segments": [
                    space.circuit(seg)
                    for space, seg in zip(problem.spaces, problem.segments(genome))
                ],
                "blocks_per_segment": [
                    problem.segment_of_block.count(s) for s in range(len(problem.spaces))
                ],
            }
        )
    return rows, circuits
