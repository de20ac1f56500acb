"""Command-line interface; a thin client of the HTTP service.

Every subcommand posts to the in-process FastAPI app, prints one line
per report record, and optionally writes JSON/CSV to --out.  Exit
codes: 0 all bounds pass, 1 a bound failed, 2 usage or config error.
"""

from __future__ import annotations

import csv
import json
import pathlib
import sys

import click
from fastapi.testclient import TestClient

from .service import app


def _load_config(path):
    if path is None:
        return {}
    try:
        doc = json.loads(pathlib.Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot read config: {exc}")
    if not isinstance(doc, dict):
        raise click.ClickException("config must be a JSON object")
    return doc


def _common(fn):
    fn = click.option("--config", "config_path", type=click.Path(), default=None,
                      help="JSON config file; flags override its fields.")(fn)
    fn = click.option("--seed", type=int, default=None, help="64-bit run seed.")(fn)
    fn = click.option("--out", "out_dir", type=click.Path(), default=None,
                      help="Directory for report files.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["json", "csv", "both"]),
                      default="json", show_default=True)(fn)
    fn = click.option("--trials", type=int, default=None,
                      help="Monte Carlo / fuzz trial count.")(fn)
    fn = click.option("--tolerance", type=float, default=None,
                      help="Numeric comparison tolerance.")(fn)
    return fn


def _execute(suites, config_path, seed, out_dir, fmt, trials, tolerance,
             id_prefixes=None):
    doc = _load_config(config_path)
    if suites is not None:
        doc["suites"] = suites
    if seed is not None:
        doc["seed"] = seed
    if trials is not None:
        doc["trials"] = trials
    if tolerance is not None:
        doc["tolerance"] = tolerance
    doc.setdefault("seed", 0)
    doc.setdefault("trials", 1000)
    doc.setdefault("tolerance", 1e-6)

    client = TestClient(app)
    resp = client.post("/experiments", json=doc)
    if resp.status_code == 422:
        click.echo(f"config error: {resp.json()['detail']}", err=True)
        sys.exit(2)
    resp.raise_for_status()
    body = resp.json()
    records = body["records"]
    if id_prefixes is not None:
        records = [r for r in records
                   if any(r["id"].startswith(p) for p in id_prefixes)]
    for rec in records:
        status = "PASS" if rec["passed"] else "FAIL"
        click.echo(
            f"[{status}] {rec['id']}: {rec['metric']} = "
            f"{json.dumps(rec['value'])} (bound {json.dumps(rec['bound'])}, "
            f"{rec['provenance']})"
        )
    click.echo(f"determinism-hash: {body['determinism_hash']}")
    if out_dir is not None:
        out = pathlib.Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        payload = {
            "records": records,
            "determinism_hash": body["determinism_hash"],
            "started_at": body["started_at"],
        }
        if fmt in ("json", "both"):
            (out / "report.json").write_text(json.dumps(payload, indent=2))
        if fmt in ("csv", "both"):
            with (out / "report.csv").open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["id", "metric", "value", "bound", "passed",
                            "provenance", "seed"])
                for r in records:
                    w.writerow([r["id"], r["metric"], json.dumps(r["value"]),
                                json.dumps(r["bound"]), str(r["passed"]).lower(),
                                r["provenance"], r["seed"]])
    failed = [r for r in records if not r["passed"]]
    sys.exit(1 if failed else 0)


@click.group()
def main():
    """Workbench for key distillation, conjugate-coding authentication
    with key recycling, and composable error accounting."""


@main.command()
@_common
def entropy(config_path, seed, out_dir, fmt, trials, tolerance):
    """Min-entropy and guessing-probability checks."""
    _execute(["entropy"], config_path, seed, out_dir, fmt, trials, tolerance)


@main.command("hash-audit")
@_common
def hash_audit(config_path, seed, out_dir, fmt, trials, tolerance):
    """Exhaustive universality / strong-universality / uniformity audits."""
    _execute(["hash-audit"], config_path, seed, out_dir, fmt, trials, tolerance)


@main.command()
@_common
def distill(config_path, seed, out_dir, fmt, trials, tolerance):
    """Error-correction + privacy-amplification pipeline runs."""
    _execute(["distill"], config_path, seed, out_dir, fmt, trials, tolerance)


@main.group()
def fsauth():
    """Conjugate-coding authentication sessions and attacks."""


@fsauth.command("run")
@_common
def fsauth_run(config_path, seed, out_dir, fmt, trials, tolerance):
    """Honest protocol sessions (exhaustive and Monte Carlo)."""
    _execute(["fsauth"], config_path, seed, out_dir, fmt, trials, tolerance,
             id_prefixes=["fsauth/honest"])


@fsauth.command("attack")
@_common
def fsauth_attack(config_path, seed, out_dir, fmt, trials, tolerance):
    """Attack harness records (forgery and substitution)."""
    _execute(["fsauth"], config_path, seed, out_dir, fmt, trials, tolerance,
             id_prefixes=["fsauth/impersonation"])


@main.command()
@_common
def bounds(config_path, seed, out_dir, fmt, trials, tolerance):
    """Closed-form bound evaluation (eps_adv, eps_noise, key replacement)."""
    _execute(["bounds"], config_path, seed, out_dir, fmt, trials, tolerance)


@main.command()
@_common
def lemmas(config_path, seed, out_dir, fmt, trials, tolerance):
    """Distance-chain, chain-rule, event-conditioning, guessing-game checks."""
    _execute(["lemmas"], config_path, seed, out_dir, fmt, trials, tolerance)


@main.command()
@_common
def report(config_path, seed, out_dir, fmt, trials, tolerance):
    """Run the full suite and print the determinism hash."""
    _execute(None, config_path, seed, out_dir, fmt, trials, tolerance)


if __name__ == "__main__":
    main()
