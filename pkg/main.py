"""
NodeHilb — certificate-producing verifier for the local Hilbert scheme of a node.
Command-line entry point: argument parsing, request validation, suite run and exit code.
"""

import argparse
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from config import settings
from exceptions import NodeHilbError, UsageError
from logging_config import setup_logging
from models.report import worst_status
from schemas.verify_schemas import SUITES, VerifyRequest
from services.emit_service import EmitService
from services.suite_service import SuiteService

logger = logging.getLogger("nodehilb.main")

suite_service = SuiteService()
emit_service = EmitService()


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


# ── Parser ────────────────────────────────────────────────
def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nodehilb", description=f"{settings.app_name} {settings.engine_version}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    verify = commands.add_parser("verify", help="run a verification suite and emit a certificate")
    verify.add_argument("suite", choices=SUITES + ("all",))
    verify.add_argument("--m", type=int)
    verify.add_argument("--n", type=int)
    verify.add_argument("--j", type=int)
    verify.add_argument("--k", type=int)
    verify.add_argument("--slow", action="store_true", default=None, help="include slow-gated checks")
    verify.add_argument("--jobs", type=int, help="worker threads")
    verify.add_argument("--format", choices=("json", "text"))
    verify.add_argument("--out", type=Path, help="write the certificate here instead of stdout")
    verify.add_argument("--cache", type=Path, help="Gröbner cache directory")
    verify.add_argument("--timeout", type=float, help="seconds before an isolated check is skipped")
    verify.add_argument("--timings", action="store_true", default=None, help="record real durations")
    verify.add_argument("--override", metavar="TOKEN")
    verify.add_argument("--debug", action="store_true")
    return parser


def parse_request(argv: list[str] | None = None) -> tuple[VerifyRequest, bool]:
    args = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if k not in ("command", "debug") and v is not None}
    try:
        return VerifyRequest(**fields), args.debug
    except ValidationError as exc:
        problems = "; ".join(f"{'.'.join(map(str, e['loc'])) or 'request'}: {e['msg']}" for e in exc.errors())
        raise UsageError(problems) from exc


# ── Entry point ───────────────────────────────────────────
def main(argv: list[str] | None = None) -> int:
    setup_logging(debug=settings.debug)
    try:
        request, debug = parse_request(argv)
    except UsageError as exc:
        logger.error("Usage: %s", exc.message)
        return exc.exit_code
    if debug:
        setup_logging(debug=True)

    try:
        certificate = suite_service.run_suite(request)
        emit_service.emit(certificate, request.format, request.out)
    except NodeHilbError as exc:
        logger.error("%s: %s", type(exc).__name__, exc.message)
        return exc.exit_code
    return worst_status(certificate.statuses()).severity


if __name__ == "__main__":
    sys.exit(main())
