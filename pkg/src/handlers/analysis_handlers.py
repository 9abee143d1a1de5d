"""Spectral, splitting and chain-recurrence subcommands."""

from typing import Any, Dict

import numpy as np
from loguru import logger

from config.settings import Settings
from src.dynamics.semigroup import MatrixSemigroup
from src.dynamics.splitting import (
    certify_rate_bound,
    check_hyperbolic,
    check_spectral_condition,
    compute_splitting,
    splitting_residuals,
)
from src.dynamics.systems import check_generalized_hyperbolic
from src.exceptions import ConfigError
from src.handlers.model_handlers import ModelBundle, build_model
from src.models.experiment import ExperimentConfig, GridSpec
from src.recurrence.chain import box_grid, build_chain_graph, circle_grid, is_nonwandering
from src.services.report_writer import ExperimentOutcome
from src.utils.serialization import json_float, vector_from_json, vector_to_json

# Box grids grow as count^dim
MAX_GRID_NODES = 200_000


def handle_spectrum(config: ExperimentConfig, settings: Settings) -> ExperimentOutcome:
    """σ(A), σ(T(1)), the hyperbolicity gap and the resolvent sweep.

    Args:
        config: Validated experiment config
        settings: Process settings (gap tolerance)

    Returns:
        ExperimentOutcome with the spectral report
    """
    bundle = build_model(config.model, settings)
    T = bundle.semigroup
    hyperbolicity = check_hyperbolic(T, settings.gap_tol)
    result: Dict[str, Any] = {
        "model": T.name,
        "dim": T.dim,
        "hyperbolicity": hyperbolicity.to_report(),
    }
    summary: Dict[str, Any] = {
        "model": T.name,
        "hyperbolic": hyperbolicity.hyperbolic,
        "gap": hyperbolicity.gap,
    }

    if T.generator is not None:
        eigenvalues = T.eigenvalues if isinstance(T, MatrixSemigroup) else np.linalg.eigvals(T.generator)
        result["generator_spectrum"] = vector_to_json(eigenvalues)
        spectral = check_spectral_condition(T.generator, config.omega_max, config.omega_samples)
        result["spectral_condition"] = spectral.to_report()
        summary["no_imaginary_spectrum"] = spectral.no_imaginary_spectrum
        summary["resolvent_sup"] = spectral.resolvent_sup

    if bundle.gh_model is not None:
        ring = check_hyperbolic(bundle.gh_model.periodic_closure(), settings.gap_tol)
        result["ring_hyperbolicity"] = ring.to_report()
        result["notes"] = ["the truncated window is nilpotent; the ring closure carries the spectral verdict"]
        summary["ring_hyperbolic"] = ring.hyperbolic

    return ExperimentOutcome(result=result, summary=summary)


def _gh_split(bundle: ModelBundle, settings: Settings) -> ExperimentOutcome:
    model = bundle.gh_model
    gh = check_generalized_hyperbolic(model)
    ring = check_hyperbolic(model.periodic_closure(), settings.gap_tol)
    result = {
        "model": bundle.semigroup.name,
        "split": "structural",
        "convention": model.convention.value,
        "convention_evidence": dict(model.convention_evidence),
        "stable_indices": [int(j) for j in model.m_indices],
        "unstable_indices": [int(j) for j in model.n_indices],
        "generalized_hyperbolic": gh.to_report(),
        "ring_hyperbolicity": ring.to_report(),
    }
    summary = {
        "model": bundle.semigroup.name,
        "convention": model.convention.value,
        "generalized_hyperbolic": gh.holds,
        "checked": gh.checked,
        "ring_hyperbolic": ring.hyperbolic,
    }
    return ExperimentOutcome(result=result, summary=summary)


def handle_split(config: ExperimentConfig, settings: Settings) -> ExperimentOutcome:
    """M ⊕ N splitting with certified constants and the projection identities.

    Weighted shifts report their structural split and the generalized
    hyperbolic inequalities; lattice models without a generator report their
    analytic bound, re-certified on samples.
    """
    bundle = build_model(config.model, settings)
    if bundle.gh_model is not None:
        return _gh_split(bundle, settings)

    T = bundle.semigroup
    if T.generator is None:
        if T.known_bound is None:
            raise ConfigError(f"{T.name} has neither a generator nor a declared bound")
        worst = certify_rate_bound(T, T.known_bound, horizon=config.horizon)
        result = {
            "model": T.name,
            "split": "analytic",
            "bound": T.known_bound.summary(),
            "worst_ratio": worst,
        }
        return ExperimentOutcome(result=result, summary={"model": T.name, **T.known_bound.summary()})

    split = compute_splitting(
        T,
        horizon=config.horizon,
        margin=config.margin,
        n_samples=settings.split_samples,
        k_roundup=settings.k_roundup,
        gap_tol=settings.gap_tol,
    )
    residuals = splitting_residuals(split, T, n_samples=settings.split_samples)
    identities_hold = all(
        residuals[key] <= settings.algebra_tol
        for key in ("idempotent_M", "idempotent_N", "complementary", "annihilating", "commutation")
    )
    decay_holds = max(residuals["decay_ratio_M"], residuals["decay_ratio_N"]) <= 1.0 + settings.algebra_tol
    if not (identities_hold and decay_holds):
        logger.warning(f"{T.name}: splitting residuals exceed tolerance: {residuals}")

    result = {
        "model": T.name,
        "split": split.summary(),
        "residuals": residuals,
        "identities_hold": identities_hold,
        "decay_holds": decay_holds,
    }
    summary = {
        "model": T.name,
        "stable_dim": split.stable_dim,
        "unstable_dim": split.unstable_dim,
        "K_M": split.K_M,
        "lambda_M": split.lam_M,
        "K_N": split.K_N,
        "lambda_N": split.lam_N,
        "gap": split.gap,
        "identities_hold": identities_hold,
        "decay_holds": decay_holds,
    }
    return ExperimentOutcome(result=result, summary=summary)


def _grid_nodes(grid: GridSpec, dim: int) -> np.ndarray:
    if grid.kind == "circle":
        if dim != 2:
            raise ConfigError(f"Circle grids need a planar model, got dimension {dim}")
        return circle_grid(grid.radius, grid.count)
    per_axis = int(round((grid.upper - grid.lower) / grid.step)) + 1
    if per_axis**dim > MAX_GRID_NODES:
        raise ConfigError(f"A box grid with {per_axis} points per axis in dimension {dim} is too large")
    return box_grid(grid.lower, grid.upper, grid.step, dim=dim)


def handle_chainrec(config: ExperimentConfig, settings: Settings) -> ExperimentOutcome:
    """Chain graph on a finite grid, its recurrent nodes and an optional nonwandering probe."""
    bundle = build_model(config.model, settings)
    T = bundle.semigroup
    chain = config.chain
    nodes = _grid_nodes(chain.grid, T.dim)
    graph = build_chain_graph(
        T,
        nodes,
        chain.delta,
        chain.R,
        chain.t_max,
        n_times=chain.n_times,
        max_workers=settings.max_workers,
    )
    recurrent = graph.recurrent_indices()
    only_origin = bool(recurrent.size == 1 and recurrent[0] == graph.origin_index)
    result: Dict[str, Any] = {
        "model": T.name,
        "n_nodes": graph.n_nodes,
        "n_edges": int(graph.adjacency.nnz),
        "n_components": graph.n_components,
        "origin_index": graph.origin_index,
        "recurrent_indices": [int(i) for i in recurrent],
        "recurrent_points": [vector_to_json(graph.nodes[i]) for i in recurrent],
        "only_origin_recurrent": only_origin,
        "graph": graph.to_adjacency_json(),
        "notes": ["edges use finitely many sampled times; recurrence is resolution-qualified"],
    }
    summary: Dict[str, Any] = {
        "model": T.name,
        "nodes": graph.n_nodes,
        "edges": int(graph.adjacency.nnz),
        "recurrent": int(recurrent.size),
        "only_origin_recurrent": only_origin,
    }

    probe = config.probe
    if probe.point is not None:
        point = vector_from_json(probe.point)
        if point.shape[0] != T.dim:
            raise ConfigError(f"Probe point has dimension {point.shape[0]}, model has {T.dim}")
        detected = is_nonwandering(
            point,
            T,
            probe.epsilon_nbhd,
            probe.R,
            probe.t_max,
            n_probe=probe.n_probe,
            n_times=probe.n_times,
            seed=config.seed,
        )
        result["nonwandering"] = {
            "point": vector_to_json(point),
            "epsilon_nbhd": json_float(probe.epsilon_nbhd),
            "detected": detected,
        }
        summary["nonwandering_detected"] = detected

    return ExperimentOutcome(result=result, summary=summary, chain_edges=graph.edge_frame())
