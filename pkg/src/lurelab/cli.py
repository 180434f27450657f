"""Command-line entry points.

Exit codes: 0 on success, 1 on usage errors, 2 on runtime failures.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from .engine import CampaignEngine, canonical_report
from .gateway import ServerSettings, default_settings
from .ingest import replay_file
from .model import ALL_MOTIVES, CampaignConfig, MotiveId
from .simulate import Persona, evaluate, format_accuracy_table, run_exercise

DEFAULT_CONFIG = "lurelab.json"
DEFAULT_ROOT = "campaign-data"


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the contract here is 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="lurelab", description="decoy-fileshare exercise toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_init = sub.add_parser("init", help="write a default server configuration file")
    p_init.add_argument("--out", default=DEFAULT_CONFIG, help="config file to write")
    p_init.add_argument("--root", default=DEFAULT_ROOT, help="campaign data directory")
    p_init.add_argument("--force", action="store_true", help="overwrite an existing file")

    p_serve = sub.add_parser("serve", help="start a campaign and its HTTP gateway")
    p_serve.add_argument("--config", default=DEFAULT_CONFIG, help="server config file")
    p_serve.add_argument("--port", type=int, default=None, help="override the config port")
    p_serve.add_argument("--console", default=None, help="directory of built console assets")

    p_sim = sub.add_parser("sim", help="run scripted attacker exercises headless")
    p_sim.add_argument("--motive", choices=[m.value for m in ALL_MOTIVES], default=None)
    p_sim.add_argument("--epsilon", type=float, default=0.0, help="behavioural noise in [0,1]")
    p_sim.add_argument("--trials", type=int, default=1, help="campaigns per motive")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--root", default=None, help="campaign data directory (default: temp)")
    p_sim.add_argument("--export-events", default=None, metavar="PATH",
                       help="write the access events as JSON lines (single trial only)")
    p_sim.add_argument("--json", action="store_true", help="emit JSON instead of text")

    p_replay = sub.add_parser("replay", help="feed an exported event file into a fresh campaign")
    p_replay.add_argument("events", help="JSON-lines event file")
    p_replay.add_argument("--config", default=None, help="server config file to take the campaign from")
    p_replay.add_argument("--root", default=DEFAULT_ROOT,
                          help="campaign data directory (its saved state supplies the config)")

    p_report = sub.add_parser("report", help="print the campaign state from disk")
    p_report.add_argument("--root", default=DEFAULT_ROOT, help="campaign data directory")
    p_report.add_argument("--json", action="store_true", help="canonical JSON instead of text")

    return parser


def _cmd_init(args: argparse.Namespace) -> int:
    out = Path(args.out)
    if out.exists() and not args.force:
        print(f"error: {out} already exists (use --force to overwrite)", file=sys.stderr)
        return 2
    settings = default_settings(str(Path(args.root).absolute()))
    settings.write(out)
    print(f"wrote {out}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .gateway import serve

    settings = ServerSettings.from_file(args.config)
    if args.port is not None:
        settings = replace(settings, port=args.port)
    if args.console:
        settings = replace(settings, console_dir=args.console)
    # Fail fast with a clear message instead of a uvicorn traceback.
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((settings.host, settings.port))
    except OSError as exc:
        print(
            f"error: cannot listen on {settings.host}:{settings.port}: {exc}",
            file=sys.stderr,
        )
        return 2
    finally:
        probe.close()
    serve(settings)
    return 0


def _sim_config(args: argparse.Namespace, scratch: str | None) -> CampaignConfig:
    root = args.root or scratch
    assert root is not None
    return CampaignConfig(root_dir=root, persist_state=args.root is not None)


def _cmd_sim(args: argparse.Namespace, parser: _Parser) -> int:
    if not 0.0 <= args.epsilon <= 1.0:
        parser.error("--epsilon must be within [0, 1]")
    if args.trials < 1:
        parser.error("--trials must be >= 1")
    if args.trials == 1:
        if args.motive is None:
            parser.error("--motive is required when --trials is 1")
        if args.export_events and not args.root:
            parser.error("--export-events needs --root so the campaign layout is stable")
        with tempfile.TemporaryDirectory(prefix="lurelab-sim-") as scratch:
            config = _sim_config(args, scratch)
            persona = Persona(
                motive=MotiveId(args.motive), epsilon=args.epsilon, seed=args.seed
            )
            transcript = run_exercise(config, persona)
        if args.export_events:
            Path(args.export_events).write_text(
                transcript.export_events(), encoding="utf-8"
            )
        if args.json:
            print(json.dumps(transcript.to_dict(), indent=2, sort_keys=True))
        else:
            predicted = transcript.prediction.value if transcript.prediction else "none"
            print(f"prediction: {predicted}")
            print(f"correct: {str(transcript.correct).lower()}")
        return 0

    if args.export_events:
        parser.error("--export-events applies to single-trial runs only")
    motives = [MotiveId(args.motive)] if args.motive else list(ALL_MOTIVES)
    with tempfile.TemporaryDirectory(prefix="lurelab-sim-") as scratch:
        config = CampaignConfig(root_dir=scratch, persist_state=False)
        table = evaluate(config, motives, [args.epsilon], args.trials, args.seed)
    if args.json:
        print(json.dumps(table, indent=2, sort_keys=True))
    else:
        print(format_accuracy_table(table))
    return 0


def _replay_config(args: argparse.Namespace) -> CampaignConfig:
    if args.config:
        return ServerSettings.from_file(args.config).campaign
    state_file = Path(args.root) / "campaign.json"
    if state_file.exists():
        saved = json.loads(state_file.read_text(encoding="utf-8"))
        return CampaignConfig.from_dict(saved["campaign"]["config"])
    return CampaignConfig(root_dir=args.root)


def _cmd_replay(args: argparse.Namespace) -> int:
    config = _replay_config(args)
    engine = CampaignEngine.start_campaign(config)
    summary = replay_file(engine, args.events)
    print(json.dumps({"summary": summary.to_dict(), "status": engine.status.value}))
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    engine = CampaignEngine.load(args.root)
    snapshot = engine.status_snapshot()
    if args.json:
        sys.stdout.write(canonical_report(snapshot))
        return 0
    print(f"campaign: {snapshot['campaign_id']}")
    print(f"status: {snapshot['status']}")
    print(f"prediction: {snapshot['prediction'] or '-'}")
    for env in snapshot["environments"]:
        accessed = len(env["access_log"])
        quota = snapshot["accesses_per_env"]
        line = f"  env {env['index']} [{env['status']}] accesses {accessed}/{quota}"
        if env["eliminated"]:
            line += f" eliminated={env['eliminated']}"
        print(line)
        if env["scoreboard"]:
            board = ", ".join(f"{m}={s}" for m, s in env["scoreboard"].items())
            print(f"    scores: {board}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "init":
            return _cmd_init(args)
        if args.command == "serve":
            return _cmd_serve(args)
        if args.command == "sim":
            return _cmd_sim(args, parser)
        if args.command == "replay":
            return _cmd_replay(args)
        if args.command == "report":
            return _cmd_report(args)
        parser.error(f"unknown command {args.command!r}")
        return 1
    except SystemExit as exc:
        # parser.error inside a command path still means bad usage.
        return int(exc.code or 0)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
