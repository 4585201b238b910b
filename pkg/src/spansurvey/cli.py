"""Operator command line: validate specs, run the service, export, stats.

    spansurvey validate survey.json
    spansurvey serve --db data.db --port 8000 [--ui frontend/dist]
    spansurvey export --db data.db --survey media_bias --format csv --out exports/
    spansurvey stats --db data.db --survey media_bias

The admin bearer token for the HTTP API is read from the environment
variable TASSY_ADMIN_TOKEN; admin endpoints stay disabled when it is unset.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import spec as sp
from .errors import ParseError, SurveyError
from .storage import Store

ADMIN_TOKEN_ENV = "TASSY_ADMIN_TOKEN"


@dataclass
class CliConfig:
    db_path: Path
    bind_address: str = "127.0.0.1"
    port: int = 8000
    admin_token_env: str = ADMIN_TOKEN_ENV
    static_ui_dir: Path | None = None

    def check(self) -> None:
        if not (1 <= self.port <= 65535):
            raise ValueError(f"port {self.port} outside 1..65535")
        parent = self.db_path.resolve().parent
        if not parent.is_dir():
            raise ValueError(f"db directory {parent} does not exist")
        if self.static_ui_dir is not None and not self.static_ui_dir.is_dir():
            raise ValueError(f"ui directory {self.static_ui_dir} does not exist")


def cmd_validate(spec_path: str) -> int:
    try:
        raw = Path(spec_path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {spec_path}: {exc}", file=sys.stderr)
        return 2
    try:
        survey = sp.decode_spec(raw)
    except ParseError as exc:
        print(f"{spec_path}:{exc.line}: {exc.message}")
        return 1
    except SurveyError as exc:
        print(f"{spec_path}: {exc.message}")
        return 1
    violations = sp.validate_spec(survey)
    for v in violations:
        print(f"{v.path}: [{v.rule}] {v.message}")
    if violations:
        print(f"{len(violations)} violation(s)")
        return 1
    print(f"ok: {survey.survey_id} ({sum(len(s.questions) for s in survey.sections)} questions)")
    return 0


def cmd_serve(config: CliConfig) -> int:
    import uvicorn

    from .service import create_app

    try:
        config.check()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    admin_token = os.environ.get(config.admin_token_env) or None
    if not admin_token:
        print(
            f"warning: {config.admin_token_env} not set; admin endpoints disabled",
            file=sys.stderr,
        )
    store = Store(config.db_path)
    app = create_app(
        store,
        admin_token=admin_token,
        ui_dir=str(config.static_ui_dir) if config.static_ui_dir else None,
    )
    try:
        uvicorn.run(app, host=config.bind_address, port=config.port, log_level="info")
    except SystemExit as exc:
        # uvicorn exits this way on bind failure
        return int(exc.code or 1)
    finally:
        store.close()
    return 0


def cmd_export(db_path: str, survey_id: str, fmt: str, out_dir: str,
               completed_only: bool = False) -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    store = Store(db_path)
    try:
        if fmt == "csv":
            annotations_csv, responses_csv = store.export_csv(survey_id, completed_only)
            ann_path = out / f"{survey_id}_annotations.csv"
            resp_path = out / f"{survey_id}_responses.csv"
            ann_path.write_text(annotations_csv, encoding="utf-8")
            resp_path.write_text(responses_csv, encoding="utf-8")
            print(ann_path)
            print(resp_path)
        else:
            doc = store.export_full(survey_id)
            full_path = out / f"{survey_id}_full.json"
            full_path.write_text(doc, encoding="utf-8")
            print(full_path)
    except SurveyError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return 1
    finally:
        store.close()
    return 0


def cmd_stats(db_path: str, survey_id: str) -> int:
    store = Store(db_path)
    try:
        survey = store.get_spec(survey_id)
        sessions = store.sessions_for(survey_id, completed_only=False)
        completed = store.sessions_for(survey_id, completed_only=True)
        bundle = store.export_bundle(survey_id, completed_only=False)
    except SurveyError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return 1
    finally:
        store.close()

    per_question = {
        q.question_id: 0 for s in survey.sections for q in s.questions
        if q.annotation_task is not None
    }
    for row in bundle.annotations:
        per_question[row[2]] = per_question.get(row[2], 0) + 1

    print(f"survey:              {survey_id}")
    print(f"sessions started:    {len(sessions)}")
    print(f"sessions completed:  {len(completed)}")
    print(f"annotations total:   {len(bundle.annotations)}")
    if per_question:
        print("annotations per question:")
        for qid, count in per_question.items():
            print(f"  {qid:<24} {count}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spansurvey",
        description="Web surveys with text span annotation tasks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a survey spec file")
    p_validate.add_argument("spec", help="path to the survey spec")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--db", required=True, help="path to the store database")
    p_serve.add_argument("--host", default="127.0.0.1", help="bind address")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--ui", default=None, help="directory with the participant UI bundle")

    p_export = sub.add_parser("export", help="export a survey's dataset")
    p_export.add_argument("--db", required=True)
    p_export.add_argument("--survey", required=True)
    p_export.add_argument("--format", choices=["csv", "full"], default="csv")
    p_export.add_argument("--out", required=True, help="output directory")
    p_export.add_argument("--completed-only", action="store_true",
                          help="export only completed sessions (csv format)")

    p_stats = sub.add_parser("stats", help="session and annotation counts")
    p_stats.add_argument("--db", required=True)
    p_stats.add_argument("--survey", required=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        return cmd_validate(args.spec)
    if args.command == "serve":
        config = CliConfig(
            db_path=Path(args.db),
            bind_address=args.host,
            port=args.port,
            static_ui_dir=Path(args.ui) if args.ui else None,
        )
        return cmd_serve(config)
    if args.command == "export":
        return cmd_export(args.db, args.survey, args.format, args.out,
                          completed_only=args.completed_only)
    if args.command == "stats":
        return cmd_stats(args.db, args.survey)
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
