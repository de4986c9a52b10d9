"""Commodity-packing preprocessor and model transformations.

Per transport arc, commodities that carry identical cost, transformation
and concurrency coefficients are interchangeable in flight and can be
packed into one package variable. The preprocessing pipeline partitions
commodity indices by cost (step 1), by transformation rows (step 2) and by
concurrency columns (step 3), intersects the partitions (step 4), selects
the packable sets (step 5) and emits a 0/1 aggregation matrix (step 6).

The model transformation then aggregates the mass-balance rows touched by
packed arcs (plus the packed arcs' own inflow non-negativity rows) and
merges the packed columns. Row aggregation alone yields a relaxation
(lower bound); the column merge is exact once the coefficient-equality
conditions hold, which is verified entry by entry during the merge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConditionsViolated,
    InvalidAggregationMatrix,
    NTooLarge,
    PlanModelMismatch,
)
from .formulation import (
    CONCURRENCY,
    MASS_BALANCE,
    ColumnMeta,
    MILPModel,
    RowMeta,
    _Assembler,
)
from .network import TRANSPORT

Partition = tuple[tuple[int, ...], ...]


def _canonical(groups) -> Partition:
    """Sort members within groups, then groups by smallest member."""
    gs = [tuple(sorted(g)) for g in groups if len(g)]
    gs.sort(key=lambda g: g[0])
    return tuple(gs)


def partition_by_cost(c) -> Partition:
    """Step 1: group commodities with exactly equal cost coefficients."""
    c = np.asarray(c, dtype=float)
    groups: dict[float, list[int]] = {}
    for i, v in enumerate(c):
        groups.setdefault(float(v), []).append(i)
    return _canonical(groups.values())


def partition_by_transformation(F) -> Partition:
    """Step 2: l and l' group iff their F rows agree outside columns l, l'."""
    F = np.asarray(F, dtype=float)
    R = F.shape[0]

    def compatible(l: int, lp: int) -> bool:
        for u in range(R):
            if u == l or u == lp:
                continue
            if F[l, u] != F[lp, u]:
                return False
        return True

    groups: list[list[int]] = []
    for i in range(R):
        placed = False
        for g in groups:
            if all(compatible(i, j) for j in g):
                g.append(i)
                placed = True
                break
        if not placed:
            groups.append([i])
    return _canonical(groups)


def partition_by_concurrency(H) -> Partition:
    """Step 3: l and l' group iff the columns H[:, l] and H[:, l'] are equal."""
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] == 0:
        R = H.shape[1] if H.ndim == 2 else 0
        return (tuple(range(R)),) if R else ()
    groups: dict[bytes, list[int]] = {}
    for i in range(H.shape[1]):
        groups.setdefault(H[:, i].tobytes(), []).append(i)
    return _canonical(groups.values())


def intersect_partitions(p1: Partition, p2: Partition, p3: Partition) -> Partition:
    """Step 4: all nonempty triple intersections (the common refinement)."""
    out = []
    for a in p1:
        sa = set(a)
        for b in p2:
            sab = sa & set(b)
            if not sab:
                continue
            for c in p3:
                s = sab & set(c)
                if s:
                    out.append(tuple(sorted(s)))
    return _canonical(out)


def select_packables(zeta: Partition, n: int | None = None) -> Partition:
    """Step 5: drop singletons, sort by descending cardinality (ties:
    smallest member index), keep the first ``n`` sets (all when None)."""
    if n is not None and n > len(zeta):
        raise NTooLarge(f"requested {n} package sets, only {len(zeta)} exist")
    candidates = [g for g in zeta if len(g) > 1]
    candidates.sort(key=lambda g: (-len(g), g[0]))
    if n is not None:
        candidates = candidates[:n]
    return tuple(candidates)


@dataclass(frozen=True)
class PackableSets:
    zeta: Partition
    zeta_sorted: Partition
    zeta_selected: Partition


@dataclass(frozen=True)
class AggregationMatrix:
    """K x R 0/1 matrix: indicator rows for packages, unit rows for the rest."""

    G: np.ndarray
    n_packages: int  # N
    n_packed: int  # L
    n_after: int  # K = N + R - L

    def __post_init__(self):
        validate_aggregation_matrix(self.G)


def validate_aggregation_matrix(G: np.ndarray) -> None:
    G = np.asarray(G, dtype=float)
    if np.any((G != 0.0) & (G < 0.0)):
        raise InvalidAggregationMatrix("negative entries")
    col_nonzeros = (G != 0.0).sum(axis=0)
    if np.any(col_nonzeros != 1):
        raise InvalidAggregationMatrix("each column needs exactly one nonzero entry")
    row_nonzeros = (G != 0.0).sum(axis=1)
    if np.any(row_nonzeros < 1):
        raise InvalidAggregationMatrix("each row needs at least one nonzero entry")


def build_aggregation_matrix(selected: Partition, R: int) -> AggregationMatrix:
    """Step 6: package indicator rows first, then unit rows for unpacked
    commodities in ascending index order."""
    N = len(selected)
    packed = sorted(i for g in selected for i in g)
    L = len(packed)
    K = N + R - L
    G = np.zeros((K, R))
    for k, group in enumerate(selected):
        for j in group:
            G[k, j] = 1.0
    unpacked = [j for j in range(R) if j not in set(packed)]
    for offset, j in enumerate(unpacked):
        G[N + offset, j] = 1.0
    return AggregationMatrix(G=G, n_packages=N, n_packed=L, n_after=K)


@dataclass(frozen=True)
class ArcPlan:
    arc_index: int
    arc_key: tuple
    sigma1: Partition
    sigma2: Partition
    sigma3: Partition
    packables: PackableSets
    packed_groups: Partition  # final groups actually packed on this arc
    aggregation: AggregationMatrix | None

    @property
    def counts(self) -> tuple[int, int, int]:
        """(N, L, K) for this arc."""
        if self.aggregation is None:
            return (0, 0, 0)
        return (
            self.aggregation.n_packages,
            self.aggregation.n_packed,
            self.aggregation.n_after,
        )


@dataclass
class PackingPlan:
    """Everything needed to transform the full-size model, plus the per-arc
    preprocessing record for reports."""

    n_commodities: int
    commodity_ids: tuple[str, ...]
    arc_plans: tuple[ArcPlan, ...]
    skipped_arcs: tuple[int, ...]  # arcs with no packables
    row_groups: tuple[tuple[int, ...], ...]
    col_groups: tuple[tuple[int, ...], ...]
    global_groups: tuple[tuple[str, ...], ...]

    def is_empty(self) -> bool:
        return not self.col_groups

    def summary(self) -> dict:
        return {
            "arcs_packed": len(self.arc_plans),
            "arcs_skipped": len(self.skipped_arcs),
            "package_groups": ["+".join(g) for g in self.global_groups],
            "rows_aggregated": sum(len(g) - 1 for g in self.row_groups),
            "columns_removed": sum(len(g) - 1 for g in self.col_groups),
        }


def check_packing_conditions(model: MILPModel, cols, aggregated_rows=None):
    """Verify the packing conditions for one candidate column set.

    ``aggregated_rows``: row-index groups that will be merged (the
    candidate's interface rows). Within such a group the *summed*
    coefficients must be equal across candidate columns; in every other
    row the raw coefficients must be equal. Returns (True, None) or
    (False, witness) where the witness names the first violating pair.
    """
    cols = list(cols)
    if len(cols) < 2:
        return True, None
    c0 = model.obj[cols[0]]
    for j in cols[1:]:
        if model.obj[j] != c0:
            return False, ("objective", cols[0], j, float(c0), float(model.obj[j]))
    dense_cols = {j: np.zeros(model.n_rows) for j in cols}
    for r, c, v in zip(model.a_rows, model.a_cols, model.a_vals):
        if c in dense_cols:
            dense_cols[c][r] += v
    merged = np.zeros(model.n_rows, dtype=bool)
    if aggregated_rows:
        for group in aggregated_rows:
            g = list(group)
            sums = {j: dense_cols[j][g].sum() for j in cols}
            s0 = sums[cols[0]]
            for j in cols[1:]:
                if abs(sums[j] - s0) > 0.0:
                    return False, (f"aggregated-rows:{g[0]}", cols[0], j, s0, sums[j])
            merged[g] = True
    rows_to_check = np.nonzero(~merged)[0]
    v0 = dense_cols[cols[0]]
    for j in cols[1:]:
        vj = dense_cols[j]
        diff = np.nonzero(v0[rows_to_check] != vj[rows_to_check])[0]
        if diff.size:
            r = int(rows_to_check[diff[0]])
            return False, (model.row_name(r), cols[0], j, float(v0[r]), float(vj[r]))
    return True, None


def aggregate_constraints(model: MILPModel, row_groups) -> MILPModel:
    """F1 -> F2: replace each targeted row group by its unit-weight sum.

    Untargeted rows and the objective are untouched. Any valid grouping
    relaxes the model, so the optimum can only decrease.
    """
    m = model.n_rows
    group_of = np.full(m, -1, dtype=np.int64)
    for gi, group in enumerate(row_groups):
        for r in group:
            if group_of[r] != -1:
                raise InvalidAggregationMatrix(f"row {r} in two groups")
            if not (0 <= r < m):
                raise InvalidAggregationMatrix(f"row {r} out of range")
            group_of[r] = gi
        if len(group) == 0:
            raise InvalidAggregationMatrix("empty row group")

    new_index = np.full(m, -1, dtype=np.int64)
    emitted_for_group: dict[int, int] = {}
    new_meta: list[RowMeta] = []
    new_rhs: list[float] = []
    for r in range(m):
        gi = group_of[r]
        if gi == -1:
            new_index[r] = len(new_meta)
            new_meta.append(model.row_meta[r])
            new_rhs.append(float(model.rhs[r]))
        elif gi not in emitted_for_group:
            idx = len(new_meta)
            emitted_for_group[gi] = idx
            new_index[r] = idx
            members = tuple(
                model.row_meta[rr].commodity or model.row_meta[rr].label or str(rr)
                for rr in row_groups[gi]
            )
            base = model.row_meta[r]
            new_meta.append(
                RowMeta(
                    base.family,
                    node=base.node,
                    time_index=base.time_index,
                    commodity=base.commodity,
                    arc_index=base.arc_index,
                    label=base.label,
                    members=members,
                )
            )
            new_rhs.append(sum(float(model.rhs[rr]) for rr in row_groups[gi]))
        else:
            new_index[r] = emitted_for_group[gi]

    return MILPModel(
        model.obj.copy(),
        new_index[model.a_rows],
        model.a_cols.copy(),
        model.a_vals.copy(),
        new_rhs,
        model.lb.copy(),
        model.ub.copy(),
        model.integer.copy(),
        list(model.col_meta),
        new_meta,
        provenance=dict(model.provenance),
    )


def pack_variables(model: MILPModel, col_groups, tol: float = 0.0) -> MILPModel:
    """F2 -> F3: merge each column group into one package column.

    Coefficients must agree entry by entry across group members (within
    ``tol``; exact by default) in every row; columns fixed to zero are
    merged without the check since they carry no flow. Raises
    ConditionsViolated with a witness otherwise.
    """
    n = model.n_cols
    group_of = np.full(n, -1, dtype=np.int64)
    for gi, group in enumerate(col_groups):
        if len(group) == 0:
            raise ConditionsViolated("empty column group")
        for c in group:
            if group_of[c] != -1:
                raise ConditionsViolated(f"column {c} in two groups")
            group_of[c] = gi

    dense: dict[int, np.ndarray] = {}
    for gi, group in enumerate(col_groups):
        for c in group:
            dense[c] = np.zeros(model.n_rows)
    for r, c, v in zip(model.a_rows, model.a_cols, model.a_vals):
        if int(c) in dense:
            dense[int(c)][r] += v

    for gi, group in enumerate(col_groups):
        group = list(group)
        lead = group[0]
        fixed = all(
            model.ub[c] - model.lb[c] <= 1e-15 and abs(model.lb[c]) <= 1e-15
            for c in group
        )
        if model.integer[list(group)].any():
            raise ConditionsViolated(f"group {group} contains a discrete column")
        if fixed:
            continue
        ok, witness = check_packing_conditions(model, group)
        if not ok and tol > 0.0:
            ok = _within_tol(model, dense, group, tol)
            witness = None if ok else witness
        if not ok:
            raise ConditionsViolated(f"coefficients differ in group {group}", witness)

    keep = group_of == -1
    new_col_of = np.full(n, -1, dtype=np.int64)
    new_meta: list[ColumnMeta] = []
    new_obj: list[float] = []
    new_lb: list[float] = []
    new_ub: list[float] = []
    new_int: list[bool] = []
    emitted: dict[int, int] = {}
    lead_of_group = {gi: min(g) for gi, g in enumerate(col_groups)}
    members_of_group = {gi: tuple(sorted(g)) for gi, g in enumerate(col_groups)}
    for c in range(n):
        gi = group_of[c]
        if gi == -1:
            new_col_of[c] = len(new_meta)
            new_meta.append(model.col_meta[c])
            new_obj.append(float(model.obj[c]))
            new_lb.append(float(model.lb[c]))
            new_ub.append(float(model.ub[c]))
            new_int.append(bool(model.integer[c]))
        elif gi not in emitted:
            idx = len(new_meta)
            emitted[gi] = idx
            new_col_of[c] = idx
            members = members_of_group[gi]
            meta0 = model.col_meta[members[0]]
            package = tuple(
                model.col_meta[mc].commodity or model.col_meta[mc].label
                for mc in members
            )
            new_meta.append(ColumnMeta(meta0.arc_index, package=package))
            lead = lead_of_group[gi]
            new_obj.append(float(model.obj[lead]))
            new_lb.append(float(sum(model.lb[mc] for mc in members)))
            ubs = [model.ub[mc] for mc in members]
            new_ub.append(float(sum(ubs)) if all(np.isfinite(ubs)) else np.inf)
            new_int.append(False)
        else:
            new_col_of[c] = emitted[gi]

    # keep a single coefficient copy per merged group: entries from the
    # lead column pass through, other members' entries are dropped
    lead_cols = {lead_of_group[gi] for gi in range(len(col_groups))}
    mask = np.array(
        [group_of[c] == -1 or c in lead_cols for c in model.a_cols], dtype=bool
    )
    return MILPModel(
        new_obj,
        model.a_rows[mask],
        new_col_of[model.a_cols[mask]],
        model.a_vals[mask],
        model.rhs.copy(),
        new_lb,
        new_ub,
        new_int,
        new_meta,
        list(model.row_meta),
        provenance=dict(model.provenance),
    )


def _within_tol(model, dense, group, tol) -> bool:
    lead = dense[group[0]]
    for c in group[1:]:
        diff = np.abs(dense[c] - lead)
        scale = np.maximum(np.abs(lead), 1.0)
        if np.any(diff > tol * scale):
            return False
        if abs(model.obj[c] - model.obj[group[0]]) > tol * max(
            1.0, abs(model.obj[group[0]])
        ):
            return False
    return True


def apply_plan(model: MILPModel, plan: PackingPlan) -> MILPModel:
    """Aggregate rows then merge columns according to the plan."""
    if plan.n_commodities and model.col_meta:
        if len(plan.commodity_ids) != plan.n_commodities:
            raise PlanModelMismatch("corrupt plan")
    for group in plan.col_groups:
        for c in group:
            if not (0 <= c < model.n_cols):
                raise PlanModelMismatch(f"plan column {c} out of range")
    aggregated = aggregate_constraints(model, plan.row_groups)
    packed = pack_variables(aggregated, plan.col_groups)
    packed.provenance["packing_plan"] = plan
    return packed


# --- Algorithm-level orchestration ------------------------------------------


def pack_model(model: MILPModel, scenario) -> tuple[PackingPlan, MILPModel]:
    """Run the preprocessing on every transport arc and transform the model.

    Holdover arcs keep full granularity (infrastructure trades live at the
    nodes); ``fidelity.pack_idle_holdover`` additionally screens holdover
    arcs whose transformation is the identity. Per-arc partitions are
    intersected into one global partition so that the mass-balance rows at
    any shared (node, time) aggregate consistently across arcs.
    """
    plan = build_plan(model, scenario)
    if plan.is_empty():
        return plan, model
    return plan, apply_plan(model, plan)


def build_plan(model: MILPModel, scenario) -> PackingPlan:
    graph = scenario.expanded()
    space = scenario.space
    R = len(space)
    ids = tuple(space.ids())
    asm = _Assembler(scenario)
    grid = graph.grid
    n_cfg = scenario.fidelity.packing_n
    if model.n_cols != len(graph.arcs) * R:
        raise PlanModelMismatch(
            f"model has {model.n_cols} columns, expected {len(graph.arcs) * R}"
        )

    continuous = np.array([c.kind == "continuous" for c in space.commodities])

    candidates: list[int] = []
    for a_idx, arc in enumerate(graph.arcs):
        if arc.kind == TRANSPORT:
            candidates.append(a_idx)
        elif scenario.fidelity.pack_idle_holdover:
            F = asm.arc_transformation(arc)
            if np.array_equal(F.F, np.eye(R)):
                candidates.append(a_idx)

    # Steps 1-5 per candidate arc
    per_arc: dict[int, tuple[Partition, Partition, Partition, PackableSets]] = {}
    packable_arcs: list[int] = []
    skipped: list[int] = []
    for a_idx in candidates:
        arc = graph.arcs[a_idx]
        F = asm.arc_transformation(arc)
        H_full = asm.arc_concurrency(arc, F)
        keep = [
            i
            for i, lab in enumerate(H_full.labels)
            if not lab.startswith("nonneg-inflow:")
        ]
        H = H_full.H[keep, :] if keep else np.zeros((0, R))
        cost = asm.objective_row(arc)
        s1 = partition_by_cost(cost)
        s2 = partition_by_transformation(F.F)
        s3 = partition_by_concurrency(H)
        # discrete commodities stay out of any package
        s_cont = _canonical(
            [np.nonzero(continuous)[0].tolist()]
            + [[i] for i in np.nonzero(~continuous)[0].tolist()]
        )
        zeta = intersect_partitions(intersect_partitions(s1, s2, s3), s_cont, s_cont)
        sel_all = select_packables(zeta)
        n_arc = None if n_cfg is None else min(n_cfg, len(sel_all))
        selected = sel_all if n_arc is None else sel_all[:n_arc]
        sets = PackableSets(
            zeta=zeta,
            zeta_sorted=tuple(sorted((g for g in zeta), key=lambda g: (-len(g), g[0]))),
            zeta_selected=selected,
        )
        per_arc[a_idx] = (s1, s2, s3, sets)
        if selected:
            packable_arcs.append(a_idx)
        else:
            skipped.append(a_idx)

    if not packable_arcs:
        return PackingPlan(R, ids, (), tuple(skipped), (), (), ())

    # node-time safety needs production info; compute it before the meet so
    # locally-producible commodities never share a package with plain cargo
    produced_any: set[int] = set()
    for node in graph.node_ids():
        produced_any |= _produced_at_node(graph, asm, node, R)
    not_produced = [i for i in range(R) if i not in produced_any]
    if produced_any and not_produced:
        produced_split = _canonical([sorted(produced_any), not_produced])
    else:
        produced_split = _canonical([list(range(R))])

    # commodities with a hard demand anywhere keep their identity end to
    # end; pooling them with ballast would let the relaxation satisfy the
    # demand with any package mass
    demanded = {
        space.index(e.commodity)
        for e in scenario.demands
        if e.amount < 0 and e.commodity in space
    }
    rest = [i for i in range(R) if i not in demanded]
    demanded_split = _canonical([[i] for i in sorted(demanded)] + ([rest] if rest else []))

    # global partition: meet of the per-arc selections
    global_partition = _meet(
        [_complete(per_arc[a][3].zeta_selected, R) for a in packable_arcs]
        + [produced_split, demanded_split],
        R,
    )
    global_nonsingleton = tuple(g for g in global_partition if len(g) > 1)
    if not global_nonsingleton:
        return PackingPlan(R, ids, (), tuple(sorted(skipped + packable_arcs)), (), (), ())

    # node-time safety: a group may be aggregated at (node, t) only when no
    # member is demanded there and no member can be produced at the node
    produced_at: dict[str, set[int]] = {
        n: _produced_at_node(graph, asm, n, R) for n in graph.node_ids()
    }
    demand_neg: set[tuple[str, int, int]] = set()
    for e in scenario.demands:
        if e.amount < 0 and e.commodity in space:
            t_idx = int(round(e.time_days / grid.step_days))
            demand_neg.add((e.node, t_idx, space.index(e.commodity)))

    def group_safe(node: str, t: int, group) -> bool:
        for k in group:
            if k in produced_at[node]:
                return False
            if (node, t, k) in demand_neg:
                return False
        return True

    # which groups does each arc pack, and which (node, t) rows aggregate
    col_groups: list[tuple[int, ...]] = []
    agg_at: dict[tuple[str, int], set[tuple[int, ...]]] = {}
    arc_plans: list[ArcPlan] = []
    node_ids = graph.node_ids()
    node_pos = {n: i for i, n in enumerate(node_ids)}
    n_times = grid.n_steps

    def mb_row(node: str, t: int, k: int) -> int:
        return (node_pos[node] * n_times + t) * R + k

    def col_of(a_idx: int, k: int) -> int:
        return a_idx * R + k

    # concurrency row offsets per arc, for the inflow-nonneg aggregation
    conc_rows_of: dict[int, dict[str, int]] = {}
    for r_idx, meta in enumerate(model.row_meta):
        if meta.family == CONCURRENCY:
            conc_rows_of.setdefault(meta.arc_index, {})[meta.label] = r_idx

    extra_row_groups: list[tuple[int, ...]] = []
    for a_idx in packable_arcs:
        arc = graph.arcs[a_idx]
        closed = arc.kind == TRANSPORT and not arc.window_open
        packed_here: list[tuple[int, ...]] = []
        if closed:
            # zero-flow columns merge freely under the arc's own partition:
            # no interface rows exist, so the global meet does not bind
            packed_here = list(per_arc[a_idx][3].zeta_selected)
        else:
            for group in global_nonsingleton:
                if group_safe(arc.from_node, arc.depart_step, group) and group_safe(
                    arc.to_node, arc.arrive_step, group
                ):
                    packed_here.append(group)
        if not packed_here:
            skipped.append(a_idx)
            continue
        s1, s2, s3, sets = per_arc[a_idx]
        agg = build_aggregation_matrix(tuple(packed_here), R)
        arc_plans.append(
            ArcPlan(
                arc_index=a_idx,
                arc_key=arc.key(),
                sigma1=s1,
                sigma2=s2,
                sigma3=s3,
                packables=sets,
                packed_groups=tuple(packed_here),
                aggregation=agg,
            )
        )
        for group in packed_here:
            col_groups.append(tuple(col_of(a_idx, k) for k in group))
            if closed:
                continue
            agg_at.setdefault((arc.from_node, arc.depart_step), set()).add(group)
            agg_at.setdefault((arc.to_node, arc.arrive_step), set()).add(group)
            labels = conc_rows_of.get(a_idx, {})
            nonneg = tuple(
                labels[f"nonneg-inflow:{space.commodities[k].id}"]
                for k in group
                if f"nonneg-inflow:{space.commodities[k].id}" in labels
            )
            if len(nonneg) > 1:
                extra_row_groups.append(nonneg)

    row_groups: list[tuple[int, ...]] = []
    for (node, t), groups in sorted(agg_at.items(), key=lambda kv: (node_pos[kv[0][0]], kv[0][1])):
        for group in sorted(groups):
            row_groups.append(tuple(mb_row(node, t, k) for k in group))
    row_groups.extend(sorted(set(extra_row_groups)))

    return PackingPlan(
        n_commodities=R,
        commodity_ids=ids,
        arc_plans=tuple(arc_plans),
        skipped_arcs=tuple(sorted(skipped)),
        row_groups=tuple(row_groups),
        col_groups=tuple(sorted(col_groups)),
        global_groups=tuple(
            tuple(ids[k] for k in g) for g in global_nonsingleton
        ),
    )


def _produced_at_node(graph, asm, node: str, R: int) -> set[int]:
    """Commodity indices with production gains on the node's holdover arcs."""
    for arc in graph.arcs:
        if arc.kind != TRANSPORT and arc.from_node == node:
            F = asm.arc_transformation(arc)
            gains = np.nonzero((F.F > 0) & ~np.eye(R, dtype=bool))[0]
            return {int(g) for g in gains}
    return set()


def _complete(groups: Partition, R: int) -> Partition:
    """Extend a set of disjoint groups to a full partition with singletons."""
    covered = {i for g in groups for i in g}
    singles = [(i,) for i in range(R) if i not in covered]
    return _canonical(list(groups) + singles)


def _meet(partitions: list[Partition], R: int) -> Partition:
    """Common refinement of several partitions of {0..R-1}."""
    label = [tuple() for _ in range(R)]
    for p in partitions:
        for gi, g in enumerate(p):
            for i in g:
                label[i] = label[i] + (gi,)
    groups: dict[tuple, list[int]] = {}
    for i in range(R):
        groups.setdefault(label[i], []).append(i)
    return _canonical(groups.values())
