"""Command-line front end: a thin client of the transform service.

By default each command drives the FastAPI app in-process through an ASGI
transport, so no server needs to be running; `--server URL` points the
same commands at a remote `mtskit serve` instance instead.  Block files
live client-side: the CLI parses and writes them, the service does the
arithmetic.  Flags mirror the hardware interface names (`--tr-type`,
`--tr-size`, `--tr-dir`) alongside the human-readable spellings.
"""

from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path

import click
import httpx
import numpy as np

from .blocks import (
    Block,
    BlockFile,
    TransformKind,
    read_block,
    write_block_binary,
    write_block_text,
)
from .coeff import valid_orders
from .pipeline import TRACE_COLUMNS

TR_TYPE_TOKENS = {0: "dct2", 1: "dct8", 2: "dst7"}
TR_SIZE_ORDERS = {0: 4, 1: 8, 2: 16, 3: 32, 4: 64}


class ServiceClient:
    """Minimal JSON-over-HTTP client; embedded ASGI app unless --server."""

    def __init__(self, server: str | None = None):
        self.server = server

    def request(self, method: str, path: str, *, body=None, params=None) -> dict:
        if self.server:
            with httpx.Client(base_url=self.server, timeout=600.0) as client:
                response = client.request(method, path, json=body, params=params)
        else:
            response = asyncio.run(self._embedded(method, path, body, params))
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise click.ClickException(f"{path}: {detail}")
        return response.json()

    async def _embedded(self, method, path, body, params):
        from .service import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://mtskit.local", timeout=None
        ) as client:
            return await client.request(method, path, json=body, params=params)


def _spec_from_flags(kind, kind_h, kind_v, size, tr_type, tr_size) -> dict:
    """Resolve spec overrides from flags; raises UsageError on illegal
    combinations before any input file is touched."""
    if tr_type is not None:
        if kind is not None:
            raise click.UsageError("--tr-type and --type are mutually exclusive")
        kind = TR_TYPE_TOKENS[tr_type]
    if tr_size is not None:
        if size is not None:
            raise click.UsageError("--tr-size and --size are mutually exclusive")
        size = TR_SIZE_ORDERS[tr_size]
    out: dict = {}
    kh = kind_h or kind
    kv = kind_v or kind
    if kh:
        out["kind_h"] = kh
    if kv:
        out["kind_v"] = kv
    if size is not None:
        out["size_h"] = out["size_v"] = size
        for token in (kh, kv):
            if token and size not in valid_orders(TransformKind.from_token(token)):
                raise click.UsageError(f"size {size} is not valid for {token}")
    return out


def _spec_body(bf: BlockFile, overrides: dict) -> dict:
    spec = {
        "kind_h": bf.kind_h.token,
        "kind_v": bf.kind_v.token,
        "size_h": bf.block.width,
        "size_v": bf.block.height,
        "bit_depth": bf.bit_depth,
    }
    spec.update(overrides)
    return spec


def _dump_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _write_block(path: Path, bf: BlockFile, binary: bool) -> None:
    if binary:
        write_block_binary(path, bf)
    else:
        write_block_text(path, bf)


spec_flags = [
    click.option("--type", "-t", "kind", type=click.Choice(["dct2", "dct8", "dst7"]),
                 help="Transform kind for both directions."),
    click.option("--kind-h", type=click.Choice(["dct2", "dct8", "dst7"])),
    click.option("--kind-v", type=click.Choice(["dct2", "dct8", "dst7"])),
    click.option("--size", "-s", type=int, help="Square transform order."),
    click.option("--tr-type", type=click.IntRange(0, 2), default=None,
                 help="Numeric kind: 0 DCT-II, 1 DCT-VIII, 2 DST-VII."),
    click.option("--tr-size", type=click.IntRange(0, 4), default=None,
                 help="Numeric order: 0..4 for 4/8/16/32/64."),
]


def _apply_spec_flags(fn):
    for flag in reversed(spec_flags):
        fn = flag(fn)
    return fn


@click.group()
@click.option("--server", envvar="MTSKIT_SERVER", default=None,
              help="Remote service URL (default: run the service in-process).")
@click.pass_context
def main(ctx, server):
    """Bit-exact multiple-transform-selection toolkit."""
    ctx.obj = ServiceClient(server)


@main.command()
@click.argument("input_file", type=click.Path(path_type=Path))
@click.option("--output", "-o", type=click.Path(path_type=Path), required=True)
@_apply_spec_flags
@click.option("--forward", is_flag=True, help="Run the forward transform instead.")
@click.option("--binary", is_flag=True, help="Write the output block in binary form.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_obj
def transform(client, input_file, output, kind, kind_h, kind_v, size, tr_type, tr_size,
              forward, binary, fmt):
    """Inverse-transform (or forward-transform) a block file."""
    overrides = _spec_from_flags(kind, kind_h, kind_v, size, tr_type, tr_size)
    try:
        bf = read_block(input_file)
    except (OSError, ValueError) as exc:
        raise click.ClickException(str(exc)) from None
    body = {
        "spec": _spec_body(bf, overrides),
        "samples": bf.block.samples.tolist(),
        "forward": forward,
    }
    data = client.request("POST", "/transform", body=body)
    out_bf = BlockFile(
        Block(np.array(data["samples"], dtype=np.int32)),
        TransformKind.from_token(body["spec"]["kind_h"]),
        TransformKind.from_token(body["spec"]["kind_v"]),
        body["spec"]["bit_depth"],
    )
    _write_block(output, out_bf, binary)
    summary = {
        "min": data["min_value"],
        "max": data["max_value"],
        "clip_count": data["clip_count"],
        "output": str(output),
    }
    if fmt == "json":
        click.echo(_dump_json(summary), nl=False)
    else:
        click.echo(f"min {summary['min']}  max {summary['max']}  clips {summary['clip_count']}")


@main.command()
@click.argument("input_file", type=click.Path(path_type=Path))
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None)
@click.option("--trace", type=click.Path(path_type=Path), default=None,
              help="Write the per-cycle port trace CSV here.")
@click.option("--tr-dir", type=click.IntRange(0, 1), default=None,
              help="Restrict the trace to one pass: 0 horizontal, 1 vertical.")
@_apply_spec_flags
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_obj
def simulate(client, input_file, output, trace, tr_dir, kind, kind_h, kind_v, size,
             tr_type, tr_size, fmt):
    """Run the cycle-level datapath simulator over a block file."""
    overrides = _spec_from_flags(kind, kind_h, kind_v, size, tr_type, tr_size)
    try:
        bf = read_block(input_file)
    except (OSError, ValueError) as exc:
        raise click.ClickException(str(exc)) from None
    body = {
        "spec": _spec_body(bf, overrides),
        "samples": bf.block.samples.tolist(),
        "include_trace": trace is not None,
    }
    data = client.request("POST", "/simulate", body=body)
    if trace is not None:
        rows = data["trace"]
        if tr_dir is not None:
            rows = [r for r in rows if r["tr_dir"] == tr_dir]
        lines = [",".join(TRACE_COLUMNS)]
        for r in rows:
            lines.append(
                ",".join(
                    [
                        str(r["clk"]), str(r["rst_n"]), str(r["input_enable"]),
                        str(r["avc_vvc"]), str(r["tr_type"]), str(r["tr_size"]),
                        str(r["tr_dir"]),
                        f"{r['data_in'][0]};{r['data_in'][1]}",
                        str(r["data_enable"]),
                        f"{r['data_out_inter'][0]};{r['data_out_inter'][1]}",
                        f"{r['data_out_fin'][0]};{r['data_out_fin'][1]}",
                    ]
                )
            )
        trace.write_text("\n".join(lines) + "\n")
    if output is not None:
        out_bf = BlockFile(
            Block(np.array(data["samples"], dtype=np.int32)),
            TransformKind.from_token(body["spec"]["kind_h"]),
            TransformKind.from_token(body["spec"]["kind_v"]),
            body["spec"]["bit_depth"],
        )
        _write_block(output, out_bf, False)
    report = data["report"]
    result = {
        "pass_cycles": [p["pass_cycles"] for p in data["passes"]],
        "total_cycles": report["total_cycles"],
        "latency_cycles": report["latency_cycles"],
        "throughput_px_per_cycle": report["throughput_px_per_cycle"],
        "matches_reference": data["matches_reference"],
    }
    if fmt == "json":
        click.echo(_dump_json(result), nl=False)
    else:
        click.echo(
            f"pass cycles {result['pass_cycles'][0]} + {result['pass_cycles'][1]}, "
            f"total {result['total_cycles']}, latency {result['latency_cycles']}, "
            f"throughput {report['throughput_px_per_cycle']:g} px/cycle, "
            f"reference match: {result['matches_reference']}"
        )
    if not data["matches_reference"]:
        sys.exit(1)


@main.command()
@click.option("--seed", envvar="MTSKIT_SEED", type=int, default=1, show_default=True)
@click.option("--count", type=int, default=100000, show_default=True,
              help="Total 1-D vectors, spread over all stage configurations.")
@click.option("--coverage/--no-coverage", default=True,
              help="Also sweep every legal 2-D spec through the simulator.")
@click.option("--coverage-blocks", type=int, default=2, show_default=True)
@click.option("--jobs", type=int, default=None)
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None,
              help="Write the JSON summary here.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_obj
def campaign(client, seed, count, coverage, coverage_blocks, jobs, output, fmt):
    """Run the pseudo-random self-check campaign (simulator vs reference)."""
    body = {
        "seed": seed,
        "vector_count": count,
        "include_coverage": coverage,
        "coverage_blocks": coverage_blocks,
        "jobs": jobs,
    }
    data = client.request("POST", "/campaign", body=body)
    if output is not None:
        output.write_text(_dump_json(data))
    if fmt == "json":
        click.echo(_dump_json(data), nl=False)
    else:
        total_vecs = sum(s["vectors"] for s in data["shards"])
        click.echo(
            f"seed {data['seed']}: {total_vecs} vectors over {len(data['shards'])} "
            f"configs, {len(data['coverage'])} coverage specs, "
            f"failures {data['total_failures']}"
        )
    if not data["passed"]:
        sys.exit(1)


@main.command()
@click.option("--output", "-o", type=click.Path(path_type=Path), default=Path("rom.bin"),
              show_default=True)
@click.option("--map", "map_path", type=click.Path(path_type=Path), default=Path("rom.map"),
              show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_obj
def rom(client, output, map_path, fmt):
    """Dump the packed coefficient ROM image and its directory map."""
    import base64

    data = client.request("GET", "/rom")
    output.write_bytes(base64.b64decode(data["image_base64"]))
    map_path.write_text(data["map_text"])
    info = {k: data[k] for k in
            ("column_count", "total_bits", "target_columns", "target_bits",
             "delta_bits", "delta_flagged")}
    if fmt == "json":
        click.echo(_dump_json(info), nl=False)
    else:
        click.echo(
            f"target {info['target_bits']} bits / {info['target_columns']} columns; "
            f"canonical layout {info['total_bits']} bits / {info['column_count']} columns "
            f"(delta {info['delta_bits']} bits"
            + (", FLAGGED)" if info["delta_flagged"] else ")")
        )


@main.command()
@click.option("--kind", type=click.Choice(["dct2", "dct8", "dst7"]), required=True)
@click.option("--size", type=int, required=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_obj
def matrices(client, kind, size, fmt):
    """Print an integer transform matrix."""
    data = client.request("GET", f"/matrices/{kind}/{size}")
    if fmt == "json":
        click.echo(_dump_json(data), nl=False)
    else:
        click.echo(f"{data['kind']} {data['n']}x{data['n']} (scale 2^{data['scale_log2']:g})")
        for row in data["entries"]:
            click.echo(" ".join(f"{v:5d}" for v in row))


@main.group(invoke_without_command=True)
@click.option("--arch", type=click.Choice(["mcm", "rm"]), default=None)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_context
def cost(ctx, arch, fmt):
    """Structural cost reports for the two architectures."""
    if ctx.invoked_subcommand is None:
        if arch is None:
            raise click.UsageError("provide --arch or use 'cost report/fps'")
        ctx.invoke(cost_report, arch=arch, fmt=fmt)


@cost.command(name="report")
@click.option("--arch", type=click.Choice(["mcm", "rm"]), required=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_obj
def cost_report(client, arch, fmt):
    """Adder/multiplier/ROM counts for one architecture."""
    data = client.request("GET", f"/cost/{arch}")
    if fmt == "json":
        click.echo(_dump_json(data), nl=False)
    else:
        click.echo(
            f"{data['architecture']}: {data['multipliers']} multipliers, "
            f"{data['adders']} adders, {data['rom_bits']} ROM bits"
        )
        click.echo(data["notes"])


@cost.command(name="fps")
@click.option("--clock-mhz", type=float, default=600.0, show_default=True)
@click.option("--width", type=int, default=3840, show_default=True)
@click.option("--height", type=int, default=2160, show_default=True)
@click.option("--chroma-factor", type=float, default=1.5, show_default=True)
@click.option("--passes", type=int, default=2, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_obj
def cost_fps(client, clock_mhz, width, height, chroma_factor, passes, fmt):
    """Frame-rate estimate from the 2 px/cycle throughput."""
    params = {
        "clock_hz": clock_mhz * 1e6,
        "width": width,
        "height": height,
        "chroma_factor": chroma_factor,
        "passes": passes,
    }
    data = client.request("GET", "/fps", params=params)
    if fmt == "json":
        click.echo(_dump_json(data), nl=False)
    else:
        click.echo(
            f"{width}x{height} @ {clock_mhz:g} MHz, chroma x{chroma_factor:g}, "
            f"{passes} passes: {data['fps_estimate']:.2f} fps "
            f"(conservative published figure: {data['reported_conservative_fps']} fps)"
        )


@main.group()
def golden():
    """Golden input/output vector management."""


@golden.command(name="export")
@click.option("--root", type=click.Path(path_type=Path), required=True)
@click.option("--kind-h", type=click.Choice(["dct2", "dct8", "dst7"]), default="dst7")
@click.option("--kind-v", type=click.Choice(["dct2", "dct8", "dst7"]), default="dst7")
@click.option("--size-h", type=int, default=4, show_default=True)
@click.option("--size-v", type=int, default=4, show_default=True)
@click.option("--bit-depth", type=click.Choice(["8", "10"]), default="8")
@click.option("--count", type=int, default=10, show_default=True)
@click.option("--seed", envvar="MTSKIT_SEED", type=int, default=1, show_default=True)
@click.pass_obj
def golden_export(client, root, kind_h, kind_v, size_h, size_v, bit_depth, count, seed):
    """Export golden vector pairs for cross-implementation conformance."""
    body = {
        "spec": {
            "kind_h": kind_h,
            "kind_v": kind_v,
            "size_h": size_h,
            "size_v": size_v,
            "bit_depth": int(bit_depth),
        },
        "count": count,
        "seed": seed,
        "root": str(root),
    }
    data = client.request("POST", "/golden/export", body=body)
    click.echo(f"wrote {data['count']} vector pairs under {data['directory']}")


@golden.command(name="verify")
@click.argument("directory", type=click.Path(path_type=Path))
def golden_verify(directory):
    """Re-check exported goldens against the reference transform."""
    from .harness import verify_golden

    try:
        mismatches = verify_golden(directory)
    except (OSError, ValueError, KeyError) as exc:
        raise click.ClickException(str(exc)) from None
    if mismatches:
        click.echo(f"{len(mismatches)} mismatching vectors: {', '.join(mismatches[:8])}")
        sys.exit(1)
    click.echo("all golden vectors match")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the transform service with uvicorn."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
