"""Batch command-line entry points.

Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error. Report
numbers print with two decimals; machine-readable JSON keeps full precision.
"""
from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from .errors import BackendError, DataError, DeskTwinError, FormatError, PipelineError
from .geometry import RigidTransform, quat_to_matrix


@click.group()
def cli():
    """Desk-scale digital twin tools."""


def _load_camera_spec(path) -> "PinholeCamera":
    from .splats.types import PinholeCamera

    doc = json.loads(Path(path).read_text())
    pose = doc.get("pose", {})
    if "rotation" in pose:
        w2c = RigidTransform.from_dict(pose)
    elif "position" in pose and "quaternion" in pose:
        R = quat_to_matrix(np.asarray(pose["quaternion"], dtype=float))
        p = np.asarray(pose["position"], dtype=float)
        w2c = RigidTransform(R.T, -R.T @ p)
    else:
        w2c = RigidTransform()
    return PinholeCamera(
        fx=float(doc["fx"]), fy=float(doc.get("fy", doc["fx"])),
        cx=float(doc.get("cx", (int(doc["width"]) - 1) / 2.0)),
        cy=float(doc.get("cy", (int(doc["height"]) - 1) / 2.0)),
        width=int(doc["width"]), height=int(doc["height"]),
        near=float(doc.get("near", 0.05)), far=float(doc.get("far", 500.0)),
        world_to_camera=w2c)


@cli.command()
@click.argument("splats_path", type=click.Path(exists=True))
@click.option("--camera", "camera_path", type=click.Path(exists=True),
              required=True, help="camera spec JSON")
@click.option("--out", type=click.Path(), required=True, help="output PNG")
@click.option("--tile", default=16, show_default=True)
@click.option("--repeat", default=1, show_default=True,
              help="render N times and report the frame rate")
@click.option("--reference", is_flag=True, help="use the reference renderer")
def render(splats_path, camera_path, out, tile, repeat, reference):
    """Render a splat PLY to a PNG and print the measured FPS."""
    from .imageio import save_png
    from .metrics import fps_meter
    from .splats import load_splats, render_reference, render_tiled

    splats = load_splats(splats_path)
    cam = _load_camera_spec(camera_path)
    t0 = time.perf_counter()
    img = None
    for _ in range(max(repeat, 1)):
        if reference:
            img = render_reference(cam, splats)
        else:
            img = render_tiled(cam, splats, tile=tile)
    elapsed = time.perf_counter() - t0
    save_png(out, img)
    fps = fps_meter(max(repeat, 1), elapsed)
    click.echo(f"frames: {repeat}  elapsed: {elapsed:.2f} s  fps: {fps:.2f}")


@cli.command()
@click.argument("in_path", type=click.Path(exists=True))
@click.argument("out_path", type=click.Path())
@click.option("--rotate", nargs=4, type=float, default=(1.0, 0.0, 0.0, 0.0),
              show_default=True, help="quaternion w x y z")
@click.option("--translate", nargs=3, type=float, default=(0.0, 0.0, 0.0),
              show_default=True)
def transform(in_path, out_path, rotate, translate):
    """Apply a rigid transform to a splat PLY."""
    from .splats import load_splats, save_splats, transform_set

    T = RigidTransform(quat_to_matrix(np.array(rotate)), np.array(translate))
    save_splats(out_path, transform_set(T, load_splats(in_path)))
    click.echo(f"wrote {out_path}")


@cli.command()
@click.argument("cloud_path", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True, help="output mesh")
@click.option("--res", default=64, show_default=True)
@click.option("--tol", default=1e-6, show_default=True)
@click.option("--k", default=16, show_default=True,
              help="neighbors for normal estimation")
def recon(cloud_path, out, res, tol, k):
    """Reconstruct a mesh from a point cloud (PLY or XYZ)."""
    from .recon import (OrientedPointCloud, estimate_normals, load_point_cloud,
                        reconstruct, save_mesh_obj, save_mesh_ply)

    points, normals = load_point_cloud(cloud_path)
    if normals is None:
        cloud, flagged = estimate_normals(points, k=k)
        if flagged:
            click.echo(f"note: {flagged} degenerate neighborhoods", err=True)
    else:
        cloud = OrientedPointCloud(points, normals)
    mesh, report = reconstruct(cloud, res=(res, res, res), tol=tol)
    writer = save_mesh_ply if str(out).endswith(".ply") else save_mesh_obj
    writer(out, mesh)
    click.echo(f"vertices: {len(mesh.vertices)}  triangles: "
               f"{len(mesh.triangles)}  solver iterations: "
               f"{report.solver.iterations}  converged: "
               f"{report.solver.converged}")


@cli.command()
@click.argument("image_a", type=click.Path(exists=True))
@click.argument("image_b", type=click.Path(exists=True))
@click.option("--max-i", default=1.0, show_default=True)
@click.option("--fps", type=float, default=None, help="frames/second to report")
def metrics(image_a, image_b, max_i, fps):
    """Compare two PNGs; writes a metric report as JSON to stdout."""
    from .imageio import load_png
    from .metrics import compare

    report = compare(load_png(image_a), load_png(image_b), max_i=max_i, fps=fps)
    click.echo(json.dumps(report.to_dict()))


@cli.command()
@click.argument("init_path", type=click.Path(exists=True))
@click.argument("views_path", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True, help="fitted PLY")
@click.option("--loss-csv", type=click.Path(), default=None)
@click.option("--iterations", default=500, show_default=True)
def fit(init_path, views_path, out, loss_csv, iterations):
    """Fit a splat PLY to posed views listed as 'camera.json image.png' lines."""
    from .imageio import load_png
    from .optim import FitConfig, fit_splats
    from .splats import load_splats, save_splats

    base = Path(views_path).parent
    views = []
    for line in Path(views_path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"view line needs 'camera.json image.png': {line!r}")
        views.append((_load_camera_spec(base / parts[0]),
                      load_png(base / parts[1])))
    fitted, history = fit_splats(load_splats(init_path), views,
                                 FitConfig(iterations=iterations))
    save_splats(out, fitted)
    if loss_csv:
        rows = "\n".join(f"{i},{v:.17g}" for i, v in enumerate(history))
        Path(loss_csv).write_text("iteration,loss\n" + rows + "\n")
    click.echo(f"loss: {history[0]:.6f} -> {history[-1]:.6f} "
               f"({100 * (1 - history[-1] / history[0]):.2f}% reduction)")


@cli.command()
@click.argument("scene_path", type=click.Path(exists=True))
@click.argument("text")
@click.option("--backend", "backend_kind", default="mock", show_default=True,
              type=click.Choice(["mock", "live"]))
@click.option("--endpoint", default="", help="live chat-completions base URL")
@click.option("--model", default="", help="live model name")
@click.option("--api-key", default=None)
@click.option("--apply", "apply_diff", is_flag=True,
              help="apply the diff and rewrite the scene file")
def prompt(scene_path, text, backend_kind, endpoint, model, api_key, apply_diff):
    """Run one prompt through the agent pipeline; prints the diff as JSON."""
    from .agents import SessionContext, accept_pending, run_pipeline
    from .agents.backend import LiveBackend
    from .agents.mock_rules import make_default_mock
    from .scene.graph import load_scene

    scene = load_scene(scene_path)
    ctx = SessionContext(scene=scene)
    if backend_kind == "mock":
        backend = make_default_mock()
    else:
        if not endpoint or not model:
            raise click.UsageError("--backend live needs --endpoint and --model")
        backend = LiveBackend(endpoint=endpoint, model=model, api_key=api_key)
    diff, trace = run_pipeline(text, ctx, backend)
    click.echo(json.dumps({"diff": diff.to_dict(), "summary": diff.summary(),
                           "seconds": trace.total_seconds}))
    if apply_diff:
        accept_pending(ctx)
        scene.save(scene_path)
        click.echo(f"applied and saved to {scene_path}", err=True)


@cli.command(name="bench-agents")
@click.argument("suite_path", type=click.Path(exists=True))
@click.option("--scene", "scene_path", type=click.Path(exists=True),
              required=True, help="scene JSON providing catalog and anchors")
@click.option("--backend", "backend_kind", default="mock", show_default=True,
              type=click.Choice(["mock", "live"]))
@click.option("--endpoint", default="")
@click.option("--model", default="")
@click.option("--api-key", default=None)
@click.option("--trials", default=100, show_default=True)
@click.option("--json-out", type=click.Path(), default=None)
@click.option("--csv-out", type=click.Path(), default=None)
def bench_agents(suite_path, scene_path, backend_kind, endpoint, model,
                 api_key, trials, json_out, csv_out):
    """Run the repeatability/generalizability benchmark over a suite file."""
    from .agents import benchmark
    from .agents.backend import LiveBackend
    from .agents.bench import load_suite
    from .agents.mock_rules import make_default_mock
    from .scene.graph import load_scene

    suite = load_suite(suite_path)
    if backend_kind == "mock":
        backend = make_default_mock()
        label = "mock"
    else:
        if not endpoint or not model:
            raise click.UsageError("--backend live needs --endpoint and --model")
        backend = LiveBackend(endpoint=endpoint, model=model, api_key=api_key)
        label = model
    report = benchmark(suite, backend, trials,
                       scene_factory=lambda: load_scene(scene_path))
    click.echo(report.table_row(label))
    click.echo(report.to_csv(), nl=False)
    if json_out:
        Path(json_out).write_text(json.dumps(report.to_dict(), indent=2))
    if csv_out:
        Path(csv_out).write_text(report.to_csv())


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="service config JSON")
@click.option("--scene", "scene_path", type=click.Path(exists=True),
              default=None, help="scene JSON (overrides config)")
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
def serve(config_path, scene_path, host, port):
    """Serve the HTTP API."""
    import uvicorn

    from .service import create_app, load_config

    env = dict()
    if scene_path:
        env["DESKTWIN_SCENE"] = str(scene_path)
    if host:
        env["DESKTWIN_HOST"] = host
    if port:
        env["DESKTWIN_PORT"] = str(port)
    import os
    merged = {**os.environ, **env}
    config = load_config(config_path, env=merged)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")


@cli.command(name="make-assets")
@click.argument("root", type=click.Path())
def make_assets(root):
    """Generate the default catalog, assets, scenes, and benchmark suite."""
    from .agents.bench import default_suite, make_bench_scene
    from .scene.assets import build_default_assets
    from .scene.catalog import load_catalog

    catalog_path, scene_path = build_default_assets(Path(root))
    suite_path = Path(root) / "suite.json"
    suite_path.write_text(json.dumps(default_suite(), indent=2) + "\n")
    bench_scene = make_bench_scene(load_catalog(catalog_path))
    bench_scene.catalog_ref = "catalog.json"
    bench_path = Path(root) / "bench_scene.json"
    bench_scene.save(bench_path)
    click.echo(f"catalog: {catalog_path}")
    click.echo(f"scene: {scene_path}")
    click.echo(f"bench scene: {bench_path}")
    click.echo(f"suite: {suite_path}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.UsageError as e:
        click.echo(f"usage error: {e.format_message()}", err=True)
        return 1
    except (BackendError, PipelineError) as e:
        click.echo(f"backend error: {e}", err=True)
        return 3
    except (FormatError, DataError, DeskTwinError, ValueError, OSError,
            json.JSONDecodeError, KeyError) as e:
        click.echo(f"data error: {e}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
