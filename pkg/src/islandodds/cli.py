"""Command-line interface: a thin client over the HTTP service.

Every subcommand builds one scenario document and submits it to the
service, by default an in-process instance of the app (no socket), or to a
running server given with --server.  Results render as an aligned table or
as CSV; exit status is 0 on success, 1 on computation errors, 2 on invalid
documents or flags.
"""

from __future__ import annotations

import asyncio
import csv
import io
import sys
from dataclasses import dataclass
from typing import Any, NoReturn, Sequence

import click
import httpx
import yaml

from . import __version__

_CONVENTION_CHOICES = (
    "conditional_on_I", "joint_I_and_E", "large_N", "default_population", "conservative"
)


class _SyncASGITransport(httpx.BaseTransport):
    """Run the ASGI app per request inside a private event loop.

    Lets the ordinary sync httpx client talk to the in-process app; each
    response is fully buffered before the loop is torn down.
    """

    def __init__(self, app: Any) -> None:
        self._inner = httpx.ASGITransport(app=app)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        async def _go() -> tuple[int, bytes, str]:
            response = await self._inner.handle_async_request(request)
            body = await response.aread()
            await response.aclose()
            return response.status_code, body, response.headers.get("content-type", "")

        status, body, content_type = asyncio.run(_go())
        headers = {"content-type": content_type} if content_type else {}
        return httpx.Response(status_code=status, headers=headers,
                              content=body, request=request)


class ServiceClient:
    def __init__(self, server: str | None) -> None:
        if server is None:
            from .service import create_app

            self._client = httpx.Client(
                transport=_SyncASGITransport(create_app()),
                base_url="http://islandodds.internal",
                timeout=None,
            )
        else:
            self._client = httpx.Client(base_url=server, timeout=None)

    def run(self, document: dict[str, Any]) -> httpx.Response:
        return self._client.post("/v1/run", json=document)

    def reproduce(self, target: str, resolution: int) -> httpx.Response:
        return self._client.get(f"/v1/reproduce/{target}",
                                params={"resolution": resolution})


@dataclass
class CliState:
    resolution: int
    fmt: str | None
    out: str | None
    server: str | None
    conventions: tuple[str, ...]


def _fail(message: str, code: int) -> NoReturn:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _emit(state: CliState, text: str) -> None:
    if state.out is None:
        click.echo(text, nl=False)
    else:
        with open(state.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _table_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


def _csv_cell(value: Any) -> Any:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return repr(value)
    return value


def _render(columns: Sequence[str], rows: Sequence[Sequence[Any]], fmt: str) -> str:
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])
        return buffer.getvalue()
    cells = [[_table_cell(v) for v in row] for row in rows]
    widths = [len(c) for c in columns]
    for row in cells:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = ["  ".join(name.ljust(widths[i]) for i, name in enumerate(columns)).rstrip()]
    for row in cells:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"


def _error_message(payload: dict[str, Any], fallback: str) -> str:
    message = payload.get("error", fallback)
    detail = payload.get("detail")
    if detail:
        parts = []
        for entry in detail:
            loc = ".".join(str(x) for x in entry.get("loc", []))
            parts.append(f"{loc}: {entry['msg']}" if loc else entry["msg"])
        message = f"{message} ({'; '.join(parts)})"
    return message


def _submit(state: CliState, document: dict[str, Any]) -> dict[str, Any]:
    client = ServiceClient(state.server)
    try:
        response = client.run(document)
    except httpx.HTTPError as exc:
        _fail(f"cannot reach the service: {exc}", 1)
    try:
        payload = response.json()
    except ValueError:
        _fail(f"unexpected response ({response.status_code}): {response.text[:200]}", 1)
    if response.status_code == 200:
        return payload
    _fail(_error_message(payload, response.text[:200]),
          2 if response.status_code == 422 else 1)


def _apply_output(state: CliState, document: dict[str, Any]) -> str:
    output = document.setdefault("output", {})
    if not isinstance(output, dict):
        _fail("document output section must be a mapping", 2)
    output["resolution"] = state.resolution
    if state.conventions:
        output["conventions"] = list(state.conventions)
    if state.fmt is not None:
        output["format"] = state.fmt
    fmt = output.get("format", "table")
    if fmt not in ("table", "csv"):
        _fail(f"unknown output format {fmt!r}", 2)
    return fmt


def _run_document(state: CliState, document: dict[str, Any]) -> None:
    fmt = _apply_output(state, document)
    payload = _submit(state, document)
    table = payload["table"]
    _emit(state, _render(table["columns"], table["rows"], fmt))


def _load_document(path: str) -> dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        _fail(f"cannot read {path}: {exc}", 2)
    except yaml.YAMLError as exc:
        _fail(f"cannot parse {path}: {exc}", 2)
    if not isinstance(data, dict):
        _fail(f"{path} must contain a mapping, not {type(data).__name__}", 2)
    return data


def _file_command(state: CliState, path: str, allowed: tuple[str, ...]) -> None:
    document = _load_document(path)
    variant = document.get("variant")
    if variant not in allowed:
        _fail(f"this subcommand handles variants {', '.join(allowed)}; "
              f"the document says {variant!r}", 2)
    _run_document(state, document)


def _document(variant: str, parameters: dict[str, Any]) -> dict[str, Any]:
    return {"schema_version": 1, "variant": variant, "parameters": parameters}


@click.group()
@click.version_option(__version__)
@click.option("--resolution", type=int, default=4097, show_default=True,
              help="Quadrature nodes used when a density must be tabulated.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default=None,
              help="Output format (default: table, or the document's own choice).")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write the report to a file instead of stdout.")
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running service; default is in-process.")
@click.option("--convention", "conventions", multiple=True,
              type=click.Choice(_CONVENTION_CHOICES),
              help="Likelihood-ratio conventions to include (repeatable).")
@click.pass_context
def main(ctx: click.Context, resolution: int, fmt: str | None, out: str | None,
         server: str | None, conventions: tuple[str, ...]) -> None:
    """Posterior odds of identity for matching-trait evidence."""
    ctx.obj = CliState(resolution=resolution, fmt=fmt, out=out,
                       server=server, conventions=conventions)


@main.command()
@click.option("-N", "--population-others", "n_others", type=int, required=True,
              help="Number of inhabitants besides the suspect.")
@click.option("-p", "--freq", type=float, required=True, help="Trait frequency.")
@click.pass_obj
def classical(state: CliState, n_others: int, freq: float) -> None:
    """Named suspect in a homogeneous population."""
    _run_document(state, _document("classical", {"N": n_others, "p": freq}))


@main.command()
@click.option("-N", "--population-others", "n_others", type=int, required=True,
              help="Number of inhabitants besides the suspect.")
@click.option("-p", "--freq", type=float, required=True, help="Trait frequency.")
@click.pass_obj
def yellin(state: CliState, n_others: int, freq: float) -> None:
    """Suspect found by searching until someone matches."""
    _run_document(state, _document("yellin", {"N": n_others, "p": freq}))


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def depend(state: CliState, file: str) -> None:
    """Biased searches and correlated traits (document file)."""
    _file_command(state, file, ("biased_search", "correlated", "bias_to_correlation"))


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def hetero(state: CliState, file: str) -> None:
    """Known trait frequencies per subpopulation (document file)."""
    _file_command(state, file, ("hetero",))


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def uncertain(state: CliState, file: str) -> None:
    """Uncertain trait frequencies (document file)."""
    _file_command(state, file, ("uncertain", "uncertain_subpop"))


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def membership(state: CliState, file: str) -> None:
    """Suspect of unknown subpopulation (document file)."""
    _file_command(state, file, ("membership",))


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False), required=False)
@click.option("-n", "--size", type=int, default=None, help="Database size (effectiveness form).")
@click.option("-p", "--freq", type=float, default=None, help="Trait frequency (effectiveness form).")
@click.option("-q", "--inclusion-prob", type=float, default=None,
              help="Chance the offender is in the database (effectiveness form).")
@click.pass_obj
def database(state: CliState, file: str | None,
             size: int | None, freq: float | None, inclusion_prob: float | None) -> None:
    """Database search outcomes: document file, or -n/-p/-q for effectiveness."""
    flags = (size, freq, inclusion_prob)
    if file is not None:
        if any(v is not None for v in flags):
            _fail("give either a document file or the -n/-p/-q flags, not both", 2)
        _file_command(state, file, ("database", "effectiveness"))
        return
    if any(v is None for v in flags):
        _fail("effectiveness needs all of -n, -p and -q (or give a document file)", 2)
    _run_document(state, _document("effectiveness",
                                   {"n": size, "p": freq, "q": inclusion_prob}))


@main.command()
@click.option("-N", "--population", type=int, required=True, help="Total population size.")
@click.option("-p", "--freq", type=float, required=True, help="Trait frequency.")
@click.option("--inclusion", type=click.Choice(["random_sample", "sqrt_weighted"]),
              default="sqrt_weighted", show_default=True,
              help="How inclusion probability scales with database size.")
@click.option("--points", type=int, default=200, show_default=True,
              help="Number of evenly spaced database sizes.")
@click.option("--at", "at_sizes", type=int, multiple=True,
              help="Evaluate at these database sizes instead of a grid (repeatable).")
@click.pass_obj
def growth(state: CliState, population: int, freq: float, inclusion: str,
           points: int, at_sizes: tuple[int, ...]) -> None:
    """Posterior odds of a unique match as the database grows."""
    parameters: dict[str, Any] = {"N": population, "p": freq, "inclusion": inclusion,
                                  "points": points}
    if at_sizes:
        parameters["n_grid"] = sorted(at_sizes)
    _run_document(state, _document("growth", parameters))


@main.command()
@click.argument("method", type=click.Choice(["exact", "mc"]))
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--trials", type=int, default=1_000_000, show_default=True,
              help="Monte Carlo trials (mc only).")
@click.option("--seed", type=int, default=None, help="Monte Carlo seed (required for mc).")
@click.option("--event", default=None, help="Override the scenario's event.")
@click.option("--given", "conditioning", multiple=True,
              help="Override the scenario's conditioning terms (repeatable).")
@click.pass_obj
def oracle(state: CliState, method: str, file: str, trials: int, seed: int | None,
           event: str | None, conditioning: tuple[str, ...]) -> None:
    """Check a small scenario by exact enumeration or Monte Carlo."""
    if method == "mc" and seed is None:
        _fail("Monte Carlo runs need an explicit --seed for reproducibility", 2)
    scenario = _load_document(file)
    parameters: dict[str, Any] = {"method": method, "scenario": scenario}
    if event is not None:
        parameters["event"] = event
    if conditioning:
        parameters["conditioning"] = list(conditioning)
    if method == "mc":
        parameters["trials"] = trials
        parameters["seed"] = seed
    _run_document(state, _document("oracle", parameters))


@main.command()
@click.argument("target", type=click.Choice(["table1", "table2", "examples"]))
@click.pass_obj
def reproduce(state: CliState, target: str) -> None:
    """Recompute published values and report pass/fail for each."""
    client = ServiceClient(state.server)
    try:
        response = client.reproduce(target, state.resolution)
    except httpx.HTTPError as exc:
        _fail(f"cannot reach the service: {exc}", 1)
    payload = response.json()
    if response.status_code != 200:
        _fail(_error_message(payload, response.text[:200]),
              2 if response.status_code == 422 else 1)
    pieces: list[str] = []
    table = payload["table"]
    fmt = state.fmt or "table"
    if table["rows"]:
        pieces.append(_render(table["columns"], table["rows"], fmt))
        pieces.append("\n" if fmt == "table" else "")
    check_rows = [
        [c["id"], c["label"], c["expected"], c["computed"],
         "PASS" if c["passed"] else "FAIL"]
        for c in payload["checks"]
    ]
    pieces.append(_render(["check", "label", "expected", "computed", "status"],
                          check_rows, fmt))
    passed = sum(1 for c in payload["checks"] if c["passed"])
    if fmt == "table":
        pieces.append(f"{passed}/{len(payload['checks'])} checks passed\n")
    _emit(state, "".join(pieces))


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def run(state: CliState, file: str) -> None:
    """Run any scenario document."""
    _run_document(state, _load_document(file))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("islandodds.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
