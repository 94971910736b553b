"""Command-line client for the synthesis service.

The CLI parses problem configuration files (YAML or JSON, schema identical
to the service requests), sends them to the service, and renders reports.
By default it drives an in-process instance of the service; pass ``--url``
to talk to a running server instead.

Exit codes: 0 success/certified, 2 validation error, 3 infeasible or not
certified, 4 numerical failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx
import yaml

EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4

_EXIT_BY_CATEGORY = {
    "validation": EXIT_VALIDATION,
    "infeasible": EXIT_INFEASIBLE,
    "numerical": EXIT_NUMERICAL,
}


def _open_client(url: str | None):
    if url:
        return httpx.Client(base_url=url, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        # starlette warns about its httpx-based test client; it is the
        # supported in-process transport here
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app, raise_server_exceptions=False)


def _reject_non_finite(node, where: str, path: str) -> None:
    """Strict JSON cannot carry NaN/inf; report the offending key path."""
    import math

    if isinstance(node, bool):
        return
    if isinstance(node, (int, float)):
        if not math.isfinite(node):
            click.echo(f"{where}: non-finite number at {path or '<root>'}", err=True)
            sys.exit(EXIT_VALIDATION)
    elif isinstance(node, dict):
        for key, value in node.items():
            _reject_non_finite(value, where, f"{path}.{key}" if path else str(key))
    elif isinstance(node, (list, tuple)):
        for idx, value in enumerate(node):
            _reject_non_finite(value, where, f"{path}[{idx}]")


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        click.echo(f"cannot read config {path}: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        problem = getattr(exc, "problem", None) or "parse error"
        if mark is not None:
            click.echo(f"{path}:{mark.line + 1}:{mark.column + 1}: {problem}", err=True)
        else:
            click.echo(f"{path}: {problem}", err=True)
        sys.exit(EXIT_VALIDATION)
    if not isinstance(data, dict):
        click.echo(f"{path}: top level must be a mapping of config keys", err=True)
        sys.exit(EXIT_VALIDATION)
    _reject_non_finite(data, path, "")
    return data


def _load_gain(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        click.echo(f"cannot read gain file {path}: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except json.JSONDecodeError as exc:
        click.echo(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}", err=True)
        sys.exit(EXIT_VALIDATION)
    if not isinstance(data, dict):
        click.echo(f"{path}: gain file must contain a JSON object", err=True)
        sys.exit(EXIT_VALIDATION)
    _reject_non_finite(data, path, "")
    return data


def _apply_overrides(cfg: dict, method: str | None, c: float | None,
                     epsilon: float | None, gamma: float | None,
                     dt: float | None = None, horizon: float | None = None) -> dict:
    if method is not None:
        cfg["method"] = method
    if c is not None:
        cfg["c"] = c
    if epsilon is not None:
        cfg["epsilon"] = epsilon
    if gamma is not None:
        cfg["gamma"] = gamma
    if dt is not None or horizon is not None:
        sim = dict(cfg.get("simulation") or {})
        if dt is not None:
            sim["dt"] = dt
        if horizon is not None:
            sim["horizon"] = horizon
        cfg["simulation"] = sim
    return cfg


def _fail(response) -> None:
    """Print the service error and exit with the mapped code."""
    try:
        payload = response.json()
    except ValueError:
        payload = None
    if isinstance(payload, dict) and "error" in payload:
        err = payload["error"]
        where = f" [{err['field']}]" if err.get("field") else ""
        click.echo(f"error ({err.get('type', 'unknown')}{where}): "
                   f"{err.get('message', '')}", err=True)
        sys.exit(_EXIT_BY_CATEGORY.get(err.get("category"), EXIT_NUMERICAL))
    if response.status_code == 422 and isinstance(payload, dict) and "detail" in payload:
        for item in payload["detail"]:
            loc = ".".join(str(p) for p in item.get("loc", []) if p != "body")
            click.echo(f"invalid config field {loc or '<root>'}: {item.get('msg')}",
                       err=True)
        sys.exit(EXIT_VALIDATION)
    click.echo(f"request failed with HTTP status {response.status_code}", err=True)
    sys.exit(EXIT_NUMERICAL)


def _post(client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    if response.status_code != 200:
        _fail(response)
    return response.json()


def _matrix_lines(m: list[list[float]]) -> str:
    return "\n".join(
        "  [" + ", ".join(format(v, ".10g") for v in row) + "]" for row in m
    )


def _print_synthesis(body: dict) -> None:
    interval = body.get("interval")
    if interval:
        bracket = "[" if interval["closed_lower"] else "("
        click.echo(f"coupling interval: {bracket}{interval['lower']:.10g}, "
                   f"{interval['upper']:.10g})")
    gain = body["gain"]
    click.echo(f"method: {body['method']}")
    click.echo(f"c = {gain['c']:.10g}")
    click.echo(f"epsilon = {gain['epsilon']:.10g}")
    click.echo("P =")
    click.echo(_matrix_lines(gain["P"]))
    click.echo("K =")
    click.echo(_matrix_lines(gain["K"]))
    click.echo(f"bound value = {body['bound_value']:.10g} (gamma = {body['gamma']:.10g})")
    click.echo(f"admissible: {'yes' if body['admissible'] else 'no'}")


def _print_certificate(body: dict) -> None:
    click.echo("mode  eigenvalue      cost            stability margin")
    for entry in body["per_mode"]:
        click.echo(f"{entry['mode']:<5d} {entry['eigenvalue']:<15.10g} "
                   f"{entry['cost']:<15.10g} {entry['stability_margin']:.10g}")
    click.echo(f"total cost J = {body['total_cost']:.10g}")
    if body.get("bound_value") is not None:
        click.echo(f"bound value = {body['bound_value']:.10g}")
    click.echo(f"gamma = {body['gamma']:.10g}, margin = {body['margin']:.10g}")
    click.echo(f"certified: {'yes' if body['certified'] else 'no'}")


def _print_summary(summary: dict, label: str = "") -> None:
    prefix = f"{label} " if label else ""
    tail = summary.get("cost_tail_estimate")
    tail_text = f"{tail:.6g}" if tail is not None else "n/a"
    click.echo(
        f"{prefix}quadrature cost = {summary['quadrature_cost']:.10g} "
        f"(tail estimate {tail_text}), terminal consensus error = "
        f"{summary['terminal_consensus_error']:.6g} over horizon "
        f"{summary['horizon']:.6g} (dt = {summary['dt']:.6g})"
    )


@click.group()
def main() -> None:
    """Suboptimal distributed LQR consensus control toolbox."""


_url_option = click.option("--url", default=None,
                           help="Base URL of a running service; in-process when omitted.")
_method_option = click.option(
    "--method", default=None,
    type=click.Choice(["thm3", "thm4", "thm5-upper", "thm5-lower", "single"]),
    help="Override the design method from the config.")


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=False), help="Problem configuration file.")
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Write the resulting gain design as JSON.")
@_method_option
@click.option("--c", "c_value", default=None, type=float,
              help="Override the coupling scalar.")
@click.option("--epsilon", default=None, type=float,
              help="Override the Riccati shift epsilon.")
@click.option("--gamma", default=None, type=float, help="Override the cost budget.")
@_url_option
def synthesize(config_path, out_path, method, c_value, epsilon, gamma, url) -> None:
    """Design a gain and report the admissibility of the initial state."""
    cfg = _apply_overrides(_load_config(config_path), method, c_value, epsilon, gamma)
    with _open_client(url) as client:
        body = _post(client, "/synthesize", cfg)
    _print_synthesis(body)
    if out_path:
        Path(out_path).write_text(json.dumps(body["gain"], indent=2) + "\n")
        click.echo(f"gain written to {out_path}")
    if not body["admissible"]:
        sys.exit(EXIT_INFEASIBLE)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=False))
@click.option("--gain", "gain_path", default=None, type=click.Path(),
              help="Gain JSON from synthesize; designed from the config when omitted.")
@_method_option
@click.option("--c", "c_value", default=None, type=float)
@click.option("--epsilon", default=None, type=float)
@click.option("--gamma", default=None, type=float)
@_url_option
def analyze(config_path, gain_path, method, c_value, epsilon, gamma, url) -> None:
    """Evaluate the exact network cost and certify it against the budget."""
    cfg = _apply_overrides(_load_config(config_path), method, c_value, epsilon, gamma)
    gain = _load_gain(gain_path) if gain_path else None
    with _open_client(url) as client:
        body = _post(client, "/analyze", {"problem": cfg, "gain": gain})
    _print_certificate(body)
    if not body["certified"]:
        sys.exit(EXIT_INFEASIBLE)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=False))
@click.option("--gain", "gain_path", default=None, type=click.Path())
@click.option("--uncontrolled", is_flag=True, default=False,
              help="Simulate with K = 0 instead of a designed gain.")
@click.option("--out", "out_path", default="trajectory.csv", type=click.Path(),
              help="Trajectory CSV output path.")
@click.option("--dt", default=None, type=float, help="Override the integration step.")
@click.option("--horizon", default=None, type=float, help="Override the horizon.")
@_method_option
@click.option("--c", "c_value", default=None, type=float)
@click.option("--epsilon", default=None, type=float)
@click.option("--gamma", default=None, type=float)
@_url_option
def simulate(config_path, gain_path, uncontrolled, out_path, dt, horizon,
             method, c_value, epsilon, gamma, url) -> None:
    """Integrate the closed-loop network and export the trajectory as CSV."""
    cfg = _apply_overrides(_load_config(config_path), method, c_value, epsilon,
                           gamma, dt=dt, horizon=horizon)
    gain = _load_gain(gain_path) if gain_path else None
    payload = {"problem": cfg, "gain": gain, "uncontrolled": uncontrolled}
    with _open_client(url) as client:
        body = _post(client, "/simulate", payload)
    Path(out_path).write_text(body["csv"])
    _print_summary(body["summary"])
    click.echo(f"trajectory written to {out_path}")


@main.command()
@click.option("--out-dir", "out_dir", default=".", type=click.Path(),
              help="Directory for the demo trajectory CSVs.")
@click.option("--dt", default=None, type=float)
@click.option("--horizon", default=None, type=float)
@_url_option
def demo(out_dir, dt, horizon, url) -> None:
    """Run the built-in eight-oscillator network end to end."""
    payload = {}
    if dt is not None:
        payload["dt"] = dt
    if horizon is not None:
        payload["horizon"] = horizon
    with _open_client(url) as client:
        body = _post(client, "/demo", payload)
    click.echo(f"lambda_2 = {body['lambda2']:.10g}")
    click.echo(f"lambda_N = {body['lambda_max']:.10g}")
    _print_synthesis(body["synthesis"])
    click.echo("")
    _print_certificate(body["certificate"])
    click.echo("")
    _print_summary(body["controlled"], label="controlled:")
    _print_summary(body["uncontrolled"], label="uncontrolled:")
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    controlled_path = directory / "demo_controlled.csv"
    uncontrolled_path = directory / "demo_uncontrolled.csv"
    controlled_path.write_text(body["controlled_csv"])
    uncontrolled_path.write_text(body["uncontrolled_csv"])
    click.echo(f"trajectories written to {controlled_path} and {uncontrolled_path}")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(host, port) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("suboptlqr.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
