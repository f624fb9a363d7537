# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Iterable, NoReturn, TextIO

from ensemble_cluster.config import ConfigError, RunConfig, lifetime, load_config, physical_params
from ensemble_cluster.dynamics.params import PhysicalParams
from ensemble_cluster.hilbert.snapshot import load_snapshot, write_snapshot
from ensemble_cluster.hilbert.space import (
    DEFAULT_CAVITY_TRUNCATION,
    DEFAULT_MODE_TRUNCATION,
    mode_indices,
)
from ensemble_cluster.hilbert.state import StateVector, fidelity
from ensemble_cluster.model import InvariantViolation, ModelTier, Sample
from ensemble_cluster.protocol.chain import chain_modes, run_chain
from ensemble_cluster.protocol.fusion import FusionPath, run_fusion, sample_fusion
from ensemble_cluster.protocol.passes import PassSettings
from ensemble_cluster.protocol.timing import TimeBudget, feasibility
from ensemble_cluster.report.csv_report import emit_sweep_csv, emit_sweep_json
from ensemble_cluster.report.json_report import emit_json, trace_payload
from ensemble_cluster.util.fingerprint import compute_fingerprint
from ensemble_cluster.util.fs import output_path
from ensemble_cluster.util.version import get_version
from ensemble_cluster.verify.alignment import phase_aligned_fidelity
from ensemble_cluster.verify.approximation import approximation_sweep
from ensemble_cluster.verify.graphs import (
    build_reference_cluster,
    fusion_reference,
    path_graph,
    stabilizer_expectations,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INVARIANT = 2

DEFAULT_CHAIN_LENGTH = 4
DEFAULT_VALIDATE_ATOMS = (5, 10, 20)
DEFAULT_VALIDATE_RATIOS = (10.0, 20.0, 40.0)
DEFAULT_VALIDATE_CHAIN_LENGTH = 2


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; that code is reserved for invariant violations
    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


def _merge_val(primary, fallback):
    return primary if primary is not None else fallback


def _parse_ints(value: str | None) -> list[int] | None:
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"Expected comma-separated integers, got {value!r}") from None


def _parse_floats(value: str | None) -> list[float] | None:
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"Expected comma-separated numbers, got {value!r}") from None


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Path to config TOML or JSON")
    parser.add_argument("--out", help="Output directory (default: stdout only)")
    parser.add_argument("--tier", choices=[t.value for t in ModelTier], help="Model tier for cavity passes")
    parser.add_argument("--atoms", type=int, help="Atoms per ensemble (N)")
    parser.add_argument("--mode-truncation", type=int, help="Fock truncation d of each collective mode")
    parser.add_argument("--cavity-truncation", type=int, help="Fock truncation of the cavity (full tier)")
    parser.add_argument("--log-level", default="WARNING", help="Logging level for stderr diagnostics")


def parse_args(argv: Iterable[str] | None = None) -> argparse.Namespace:
    parser = _Parser(prog="ensemble-cluster")
    parser.add_argument("--version", action="version", version=f"%(prog)s {get_version()}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    chain = sub.add_parser("chain", help="Entangle K ensembles into a linear cluster state")
    _add_common(chain)
    chain.add_argument("--chain-length", "-K", type=int, help="Number of ensembles K (>= 2)")
    chain.add_argument("--seed", type=int, help="Seed recorded with the run")
    chain.add_argument("--trace-intermediates", action="store_true", default=None, help="Record every stage")

    fuse = sub.add_parser("fuse", help="Connect two cluster chains through a control-atom fusion")
    _add_common(fuse)
    fuse.add_argument("--chain-a-length", type=int, help="Length of chain A")
    fuse.add_argument("--chain-b-length", type=int, help="Length of chain B")
    fuse.add_argument("--chain-a", help="Snapshot JSON of chain A (instead of generating it)")
    fuse.add_argument("--chain-b", help="Snapshot JSON of chain B (instead of generating it)")
    fuse.add_argument("--node-a", type=int, help="Node of chain A that is consumed (default: last)")
    fuse.add_argument("--node-b", type=int, help="Node of chain B that inherits the links (default: 0)")
    fuse.add_argument("--seed", type=int, help="Seed for sampled detections")
    fuse.add_argument("--trials", type=int, help="Monte-Carlo trials; reports the success frequency")
    fuse.add_argument("--postselect", help='Detection path to follow, e.g. "+,-"')
    fuse.add_argument("--workers", type=int, help="Worker processes for Monte-Carlo trials")

    validate = sub.add_parser("validate", help="Sweep the full model against the ideal JC chain")
    _add_common(validate)
    validate.add_argument("--grid-atoms", help="Comma-separated atom numbers N")
    validate.add_argument("--ratios", help="Comma-separated dispersive ratios delta_c/(g sqrt N)")
    validate.add_argument("--chain-length", "-K", type=int, help="Chain length for each point")
    validate.add_argument("--workers", type=int, help="Worker processes for sweep points")
    validate.add_argument("--seed", type=int, help="Seed recorded with the sweep")

    return parser.parse_args(argv)


def _effective_config(cfg: RunConfig | None, args: argparse.Namespace) -> RunConfig:
    """Config file values overridden by CLI flags."""
    cfg = cfg or RunConfig()
    data = cfg.to_dict()
    physics, run, fusion, validate = data["physics"], data["run"], data["fusion"], data["validate"]
    physics["atoms"] = _merge_val(args.atoms, physics["atoms"])
    run["tier"] = _merge_val(args.tier, run["tier"])
    run["mode_truncation"] = _merge_val(args.mode_truncation, run["mode_truncation"])
    run["cavity_truncation"] = _merge_val(args.cavity_truncation, run["cavity_truncation"])
    run["out"] = _merge_val(args.out, run["out"])
    run["seed"] = _merge_val(getattr(args, "seed", None), run["seed"])
    if args.command == "chain":
        run["chain_length"] = _merge_val(args.chain_length, run["chain_length"])
        run["trace_intermediates"] = _merge_val(args.trace_intermediates, run["trace_intermediates"])
    elif args.command == "fuse":
        fusion["chain_a_length"] = _merge_val(args.chain_a_length, fusion["chain_a_length"])
        fusion["chain_b_length"] = _merge_val(args.chain_b_length, fusion["chain_b_length"])
        fusion["chain_a_snapshot"] = _merge_val(args.chain_a, fusion["chain_a_snapshot"])
        fusion["chain_b_snapshot"] = _merge_val(args.chain_b, fusion["chain_b_snapshot"])
        fusion["node_a"] = _merge_val(args.node_a, fusion["node_a"])
        fusion["node_b"] = _merge_val(args.node_b, fusion["node_b"])
        fusion["trials"] = _merge_val(args.trials, fusion["trials"])
        fusion["postselect"] = _merge_val(args.postselect, fusion["postselect"])
        fusion["workers"] = _merge_val(args.workers, fusion["workers"])
    else:
        validate["atoms"] = _merge_val(_parse_ints(args.grid_atoms), validate["atoms"])
        validate["ratios"] = _merge_val(_parse_floats(args.ratios), validate["ratios"])
        validate["chain_length"] = _merge_val(args.chain_length, validate["chain_length"])
        validate["workers"] = _merge_val(args.workers, validate["workers"])
    return RunConfig(
        physics=type(cfg.physics)(**physics),
        run=type(cfg.run)(**run),
        fusion=type(cfg.fusion)(**fusion),
        validate=type(cfg.validate)(**validate),
    )


def _settings(cfg: RunConfig) -> PassSettings:
    run = cfg.run
    base = PassSettings()
    return PassSettings(
        mode_truncation=_merge_val(run.mode_truncation, DEFAULT_MODE_TRUNCATION),
        cavity_truncation=_merge_val(run.cavity_truncation, DEFAULT_CAVITY_TRUNCATION),
        leakage_bound=_merge_val(run.leakage_bound, base.leakage_bound),
        vacuum_residual_bound=_merge_val(run.vacuum_residual_bound, base.vacuum_residual_bound),
        atom_release_bound=_merge_val(run.atom_release_bound, base.atom_release_bound),
    )


def _tier(cfg: RunConfig) -> ModelTier:
    try:
        return ModelTier.parse(cfg.run.tier or ModelTier.ANALYTIC_JC)
    except ValueError as exc:
        raise ConfigError(f"[run] tier: {exc}") from exc


def _budget(cfg: RunConfig, ensembles: int, params: PhysicalParams) -> TimeBudget:
    zone = _merge_val(cfg.run.zone_transit_s, 0.0)
    return feasibility(ensembles, params, zone_transit=zone, lifetime=lifetime(cfg.physics))


def _budget_line(budget: TimeBudget) -> str:
    margin = f"{budget.margin:.1f}x" if budget.total > 0 else "unbounded"
    verdict = "within" if budget.feasible else "EXCEEDS"
    return (
        f"time budget: K={budget.ensembles} total {budget.total * 1e3:.4f} ms "
        f"{verdict} lifetime {budget.lifetime * 1e3:.1f} ms (margin {margin})"
    )


def _write_json(out_dir: str | None, name: str, payload: dict[str, Any], stdout: TextIO) -> None:
    path = output_path(out_dir, name)
    if path is None:
        emit_json(payload, stdout)
        return
    with open(path, "w", encoding="utf-8") as f:
        emit_json(payload, f)
    logger.info("wrote %s", path)


def _summary_stream(out_dir: str | None, stdout: TextIO) -> TextIO:
    # stdout carries the machine-readable result when no output directory is set
    return stdout if out_dir is not None else sys.stderr


def _fingerprint(cfg: RunConfig) -> str:
    data = cfg.to_dict()
    # where results are written does not change them
    data["run"].pop("out", None)
    return compute_fingerprint(data)


def _compare(state: StateVector, reference: StateVector, tier: ModelTier) -> float:
    if tier is ModelTier.ANALYTIC_JC:
        return fidelity(state, reference)
    return phase_aligned_fidelity(state, reference).fidelity


def cmd_chain(cfg: RunConfig, stdout: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    params = physical_params(cfg.physics)
    tier = _tier(cfg)
    settings = _settings(cfg)
    ensembles = _merge_val(cfg.run.chain_length, DEFAULT_CHAIN_LENGTH)
    if ensembles < 2:
        raise ConfigError(f"[run] chain_length must be >= 2, got {ensembles}")
    budget = _budget(cfg, ensembles, params)

    trace = run_chain(
        ensembles,
        params,
        tier,
        trace_intermediates=bool(cfg.run.trace_intermediates),
        settings=settings,
    )
    modes = chain_modes(trace, settings.release_bound(tier))
    graph = path_graph(ensembles)
    stabilizers = stabilizer_expectations(modes, graph)
    graph_fidelity = _compare(modes, build_reference_cluster(graph, settings.mode_truncation), tier)

    extra = {
        "graph": graph.to_dict(),
        "stabilizers": stabilizers,
        "graph_fidelity": graph_fidelity,
        "time_budget": budget.to_dict(),
        "seed": cfg.run.seed,
        "params": params.to_dict(),
    }
    payload = trace_payload(
        trace,
        config_fingerprint=_fingerprint(cfg),
        embed_state=cfg.run.embed_states is not False,
        extra=extra,
    )
    out_dir = cfg.run.out
    _write_json(out_dir, "chain_trace.json", payload, stdout)
    snapshot = output_path(out_dir, "chain_state.json")
    if snapshot is not None and trace.final_state is not None:
        write_snapshot(snapshot, trace.final_state)
    summary = _summary_stream(out_dir, stdout)
    print(f"stabilizers: {' '.join(f'{v:.12f}' for v in stabilizers)}", file=summary)
    print(f"fidelity: {graph_fidelity:.12f}", file=summary)
    print(_budget_line(budget), file=summary)
    return EXIT_OK


def _load_chain(
    path: str | None,
    length: int,
    params: PhysicalParams,
    tier: ModelTier,
    settings: PassSettings,
) -> StateVector:
    if path:
        try:
            return load_snapshot(path)
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"{path}: not a state snapshot ({exc})") from exc
    if length < 2:
        raise ConfigError(f"[fusion] chain lengths must be >= 2, got {length}")
    trace = run_chain(length, params, tier, settings=settings)
    if trace.final_state is None:
        raise RuntimeError("Chain run finished without a final state")
    return trace.final_state


def cmd_fuse(cfg: RunConfig, stdout: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    params = physical_params(cfg.physics)
    tier = _tier(cfg)
    settings = _settings(cfg)
    fusion = cfg.fusion
    default_length = _merge_val(cfg.run.chain_length, DEFAULT_CHAIN_LENGTH)
    chain_a = _load_chain(
        fusion.chain_a_snapshot, _merge_val(fusion.chain_a_length, default_length), params, tier, settings
    )
    chain_b = _load_chain(
        fusion.chain_b_snapshot, _merge_val(fusion.chain_b_length, default_length), params, tier, settings
    )
    node_a = _merge_val(fusion.node_a, len(mode_indices(chain_a.subsystems)) - 1)
    node_b = _merge_val(fusion.node_b, 0)
    fingerprint = _fingerprint(cfg)
    seed = _merge_val(cfg.run.seed, 0)

    if fusion.trials is not None:
        if fusion.trials <= 0:
            raise ConfigError(f"[fusion] trials must be positive, got {fusion.trials}")
        stats = sample_fusion(
            chain_a,
            chain_b,
            node_a,
            node_b,
            params,
            fusion.trials,
            seed,
            tier,
            settings,
            workers=_merge_val(fusion.workers, 1),
        )
        payload = {
            "kind": "fusion-statistics",
            "tool_version": get_version(),
            "config_fingerprint": fingerprint,
            "seed": seed,
            "node_a": node_a,
            "node_b": node_b,
            **stats.to_dict(),
        }
        _write_json(cfg.run.out, "fusion_statistics.json", payload, stdout)
        print(
            f"success: {stats.successes}/{stats.trials} = {stats.frequency:.4f} "
            f"({stats.confidence:.0%} CI [{stats.ci_low:.4f}, {stats.ci_high:.4f}])",
            file=_summary_stream(cfg.run.out, stdout),
        )
        return EXIT_OK

    if fusion.postselect is not None:
        try:
            mode: FusionPath | Sample = FusionPath.parse(fusion.postselect)
        except ValueError as exc:
            raise ConfigError(f"[fusion] postselect: {exc}") from exc
    elif cfg.run.seed is not None:
        mode = Sample(seed)
    else:
        mode = FusionPath()

    trace = run_fusion(chain_a, chain_b, node_a, node_b, params, tier, mode=mode, settings=settings)
    extra: dict[str, Any] = {"node_a": node_a, "node_b": node_b, "mode": str(mode)}
    if trace.success and trace.final_state is not None:
        reference = fusion_reference(chain_a, chain_b, node_a, node_b, settings.release_bound(tier))
        extra["fused_fidelity"] = _compare(trace.final_state, reference, tier)
    payload = trace_payload(
        trace,
        config_fingerprint=fingerprint,
        embed_state=cfg.run.embed_states is not False,
        extra=extra,
    )
    _write_json(cfg.run.out, "fusion_trace.json", payload, stdout)
    snapshot = output_path(cfg.run.out, "fused_state.json")
    if snapshot is not None and trace.final_state is not None:
        write_snapshot(snapshot, trace.final_state)
    summary = _summary_stream(cfg.run.out, stdout)
    outcomes = ",".join(s.outcome or "" for s in trace.steps if s.outcome is not None)
    print(f"outcomes: {outcomes} success: {str(trace.success).lower()}", file=summary)
    if "fused_fidelity" in extra:
        print(f"fidelity: {extra['fused_fidelity']:.12f}", file=summary)
    return EXIT_OK


def cmd_validate(cfg: RunConfig, stdout: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    validate = cfg.validate
    atoms = _merge_val(validate.atoms, list(DEFAULT_VALIDATE_ATOMS))
    ratios = _merge_val(validate.ratios, list(DEFAULT_VALIDATE_RATIOS))
    if not atoms or not ratios:
        raise ConfigError("[validate] atoms and ratios must be non-empty")
    ensembles = _merge_val(validate.chain_length, DEFAULT_VALIDATE_CHAIN_LENGTH)
    if ensembles < 2:
        raise ConfigError(f"[validate] chain_length must be >= 2, got {ensembles}")
    settings = _settings(cfg)
    params = physical_params(cfg.physics)

    reports = approximation_sweep(
        atoms,
        ratios,
        ensembles,
        coupling=params.coupling,
        mode_truncation=settings.mode_truncation,
        cavity_truncation=settings.cavity_truncation,
        workers=_merge_val(validate.workers, 1),
    )
    budget = _budget(cfg, ensembles, params)
    extra = {
        "config_fingerprint": _fingerprint(cfg),
        "tool_version": get_version(),
        "time_budget": budget.to_dict(),
        "seed": cfg.run.seed,
    }

    csv_path = output_path(cfg.run.out, "sweep.csv")
    if csv_path is None:
        emit_sweep_csv(reports, stdout)
    else:
        with open(csv_path, "w", encoding="utf-8", newline="") as f:
            emit_sweep_csv(reports, f)
        json_path = csv_path.with_name("sweep.json")
        with open(json_path, "w", encoding="utf-8") as f:
            emit_sweep_json(reports, f, extra=extra)
        logger.info("wrote %s and %s", csv_path, json_path)
    print(_budget_line(budget), file=_summary_stream(cfg.run.out, stdout))
    return EXIT_OK


_COMMANDS = {"chain": cmd_chain, "fuse": cmd_fuse, "validate": cmd_validate}


def main(argv: Iterable[str] | None = None, stdout: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    level = getattr(logging, str(args.log_level).upper(), None)
    if not isinstance(level, int):
        print(f"error: unknown log level {args.log_level!r}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    try:
        cfg = _effective_config(load_config(args.config), args)
        return _COMMANDS[args.command](cfg, stdout)
    except InvariantViolation as exc:
        print(f"error: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, KeyError) as exc:
        # ConfigError, bad arguments and parameters that fail validation
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


