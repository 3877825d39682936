"""Emit service: certificate serialization to JSON or a one-line-per-check text view."""

import json
import logging
import os
import sys
from pathlib import Path

from exceptions import IoFailure
from models.certificate import Certificate
from models.report import CheckStatus, worst_status

logger = logging.getLogger("nodehilb.services.emit")


class EmitService:
    # ── Render ──────────────────────────────────────────────
    @staticmethod
    def to_json(certificate: Certificate) -> str:
        """Field order follows the model; nested mappings are already key-sorted."""
        return json.dumps(certificate.model_dump(mode="json"), indent=2, ensure_ascii=False) + "\n"

    @staticmethod
    def to_text(certificate: Certificate) -> str:
        lines = [f"NodeHilb {certificate.version} suite={certificate.suite} params={json.dumps(certificate.params)}"]
        for record in certificate.checks:
            line = f"{record.status.glyph} {record.status.value:<9} {record.id}  [{record.anchor.location}]"
            if record.millis:
                line += f" {record.millis}ms"
            lines.append(line)
        statuses = certificate.statuses()
        summary = ", ".join(f"{sum(1 for s in statuses if s is status)} {status.value}" for status in CheckStatus)
        lines.append(f"{len(statuses)} checks: {summary}; overall {worst_status(statuses).value}")
        return "\n".join(lines) + "\n"

    def render(self, certificate: Certificate, fmt: str = "json") -> str:
        return self.to_text(certificate) if fmt == "text" else self.to_json(certificate)

    @staticmethod
    def parse(text: str) -> Certificate:
        return Certificate.model_validate_json(text)

    # ── Write ───────────────────────────────────────────────
    def emit(self, certificate: Certificate, fmt: str = "json", out: Path | None = None) -> None:
        payload = self.render(certificate, fmt)
        if out is None:
            sys.stdout.write(payload)
            sys.stdout.flush()
            return
        out = Path(out)
        tmp = out.with_name(f"{out.name}.{os.getpid()}.tmp")
        try:
            out.parent.mkdir(parents=True, exist_ok=True)
            with tmp.open("w", encoding="utf-8", newline="\n") as f:
                f.write(payload)
            os.replace(tmp, out)
        except OSError as exc:
            tmp.unlink(missing_ok=True)
            raise IoFailure(str(out), exc.strerror or str(exc)) from exc
        logger.info("Wrote %s certificate to %s", fmt, out)
