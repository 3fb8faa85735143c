"""Session state machine and HTTP JSON API for the reader study.

Case payloads delivered to clients carry only {case_id, image_urls,
indication, prefill}: arm and draft-source information exists solely in the
server-side event log. The server's own clock is authoritative for elapsed
time; the client-reported figure is stored for audit.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .analyze import analyze
from .assign import assign_cases
from .config import LIKERT_CHOICES, REASON_TAXONOMY, StudyConfig
from .events import EventLog, StudyEvent, utc_now_iso


class ProtocolError(ValueError):
    def __init__(self, message: str, status: int = 409):
        super().__init__(message)
        self.status = status


@dataclass
class _CaseState:
    served_monotonic: float | None = None
    report_done: bool = False
    feedback_done: bool = False


@dataclass
class StudyService:
    cfg: StudyConfig
    log: EventLog = field(default_factory=EventLog)

    def __post_init__(self):
        self._lock = threading.RLock()
        self._assignments = assign_cases(self.cfg)
        self._sessions = {}  # session_id -> reader_id
        self._roles = {r.reader_id: r.role for r in self.cfg.readers}
        self._state = {}  # (reader_id, case_id) -> _CaseState
        self._replay_existing_log()

    def _replay_existing_log(self) -> None:
        for event in self.log.snapshot():
            reader_id = event.payload.get("reader_id")
            key = (reader_id, event.case_id)
            state = self._state.setdefault(key, _CaseState())
            if event.kind == "assigned":
                self._sessions[event.session_id] = reader_id
                if state.served_monotonic is None:
                    state.served_monotonic = time.monotonic()
            elif event.kind == "report_submitted":
                state.report_done = True
            elif event.kind == "feedback_submitted":
                state.feedback_done = True

    # --- session lifecycle ---

    def create_session(self, reader_id: str, role: str) -> str:
        with self._lock:
            if reader_id not in self._assignments:
                raise ProtocolError(f"unknown reader {reader_id!r}", status=404)
            if self._roles[reader_id] != role:
                raise ProtocolError(f"role mismatch for {reader_id!r}", status=400)
            session_id = uuid.uuid4().hex
            self._sessions[session_id] = reader_id
            return session_id

    def _reader_for(self, session_id: str) -> str:
        reader_id = self._sessions.get(session_id)
        if reader_id is None:
            raise ProtocolError("unknown session", status=404)
        return reader_id

    def _current_assignment(self, reader_id: str):
        for assignment in self._assignments[reader_id]:
            state = self._state.get((reader_id, assignment.case_id))
            if state is None or not state.feedback_done:
                return assignment
        return None

    def next_case(self, session_id: str):
        """Serve the reader's current case; None when the plan is complete.

        Re-requesting the in-flight case returns the same payload without
        resetting the serve timestamp (one active case per session).
        """
        with self._lock:
            reader_id = self._reader_for(session_id)
            assignment = self._current_assignment(reader_id)
            if assignment is None:
                return None
            case = self.cfg.case(assignment.case_id)
            key = (reader_id, assignment.case_id)
            state = self._state.setdefault(key, _CaseState())
            if state.served_monotonic is None:
                state.served_monotonic = time.monotonic()
                self.log.append(StudyEvent(
                    kind="assigned",
                    session_id=session_id,
                    case_id=case.case_id,
                    payload={"reader_id": reader_id, "role": self._roles[reader_id],
                             "arm": assignment.arm},
                    ts=utc_now_iso(),
                ))
            if assignment.arm == "model_draft":
                prefill = case.model_draft
            elif assignment.arm == "resident_draft":
                prefill = case.resident_draft or ""
            else:
                prefill = ""
            return {
                "case_id": case.case_id,
                "image_urls": [f"/cases/{case.case_id}/images/{k}.png"
                               for k in range(len(case.images))],
                "indication": case.indication,
                "prefill": prefill,
            }

    def submit_report(self, session_id: str, case_id: str, text: str,
                      client_elapsed_s: float | None) -> dict:
        with self._lock:
            reader_id = self._reader_for(session_id)
            assignment = next((a for a in self._assignments[reader_id] if a.case_id == case_id), None)
            if assignment is None:
                raise ProtocolError(f"unknown case {case_id!r} for this reader", status=404)
            state = self._state.get((reader_id, case_id))
            if state is None or state.served_monotonic is None:
                raise ProtocolError("case has not been served", status=409)
            if state.report_done:
                raise ProtocolError("duplicate report for this case", status=409)
            if not text or not text.strip():
                raise ProtocolError("report text must be non-empty", status=400)
            elapsed = max(time.monotonic() - state.served_monotonic, 1e-6)
            state.report_done = True
            self.log.append(StudyEvent(
                kind="report_submitted",
                session_id=session_id,
                case_id=case_id,
                payload={
                    "reader_id": reader_id,
                    "role": self._roles[reader_id],
                    "arm": assignment.arm,
                    "final_text": text,
                    "server_elapsed_s": elapsed,
                    "client_elapsed_s": client_elapsed_s,
                },
                ts=utc_now_iso(),
            ))
            return {"ok": True, "elapsed_s": elapsed}

    def submit_feedback(self, session_id: str, case_id: str, likert=None,
                        reasons=(), efficiency=None, comment: str = "") -> dict:
        with self._lock:
            reader_id = self._reader_for(session_id)
            assignment = next((a for a in self._assignments[reader_id] if a.case_id == case_id), None)
            if assignment is None:
                raise ProtocolError(f"unknown case {case_id!r} for this reader", status=404)
            state = self._state.get((reader_id, case_id))
            if state is None or not state.report_done:
                raise ProtocolError("feedback before report submission", status=409)
            if state.feedback_done:
                raise ProtocolError("duplicate feedback for this case", status=409)

            reasons = list(reasons or ())
            drafted = assignment.arm in ("model_draft", "resident_draft")
            if drafted:
                if likert not in LIKERT_CHOICES:
                    raise ProtocolError(f"likert must be one of {sorted(LIKERT_CHOICES)}", status=400)
                bad = [r for r in reasons if r not in REASON_TAXONOMY]
                if bad:
                    raise ProtocolError(f"unknown edit reasons {bad}", status=400)
                if (not isinstance(efficiency, dict)
                        or set(efficiency) != {"writing", "interpretation"}
                        or not all(isinstance(v, bool) for v in efficiency.values())):
                    raise ProtocolError("efficiency must be {writing: bool, interpretation: bool}", status=400)
            else:
                if likert is not None or reasons:
                    raise ProtocolError("scratch cases take no draft feedback", status=400)
                efficiency = None

            state.feedback_done = True
            self.log.append(StudyEvent(
                kind="feedback_submitted",
                session_id=session_id,
                case_id=case_id,
                payload={
                    "reader_id": reader_id,
                    "role": self._roles[reader_id],
                    "arm": assignment.arm,
                    "likert": likert,
                    "reasons": reasons,
                    "efficiency": efficiency,
                    "comment": comment,
                },
                ts=utc_now_iso(),
            ))
            return {"ok": True}

    def analysis(self) -> dict:
        return analyze(self.log.snapshot())

    def case_image(self, case_id: str, index: int) -> bytes:
        case = self.cfg.case(case_id)
        return Path(case.images[index]).read_bytes()


class _Handler(BaseHTTPRequestHandler):
    service: StudyService = None  # set by serve_study

    def log_message(self, fmt, *args):  # quiet server
        pass

    def _send_json(self, obj, status: int = 200) -> None:
        body = json.dumps(obj).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length", 0))
        if length == 0:
            return {}
        return json.loads(self.rfile.read(length).decode("utf-8"))

    def _route(self, method: str):
        parts = [p for p in self.path.split("?")[0].split("/") if p]
        try:
            if method == "POST" and parts == ["sessions"]:
                body = self._read_json()
                session_id = self.service.create_session(body.get("reader_id", ""), body.get("role", ""))
                return self._send_json({"session_id": session_id})
            if method == "GET" and len(parts) == 3 and parts[0] == "sessions" and parts[2] == "next":
                payload = self.service.next_case(parts[1])
                if payload is None:
                    return self._send_json({"done": True})
                return self._send_json(payload)
            if method == "POST" and len(parts) == 5 and parts[0] == "sessions" and parts[2] == "cases":
                body = self._read_json()
                if parts[4] == "report":
                    ack = self.service.submit_report(
                        parts[1], parts[3], body.get("text", ""), body.get("client_elapsed_s"))
                    return self._send_json(ack)
                if parts[4] == "feedback":
                    ack = self.service.submit_feedback(
                        parts[1], parts[3],
                        likert=body.get("likert"),
                        reasons=body.get("reasons", []),
                        efficiency=body.get("efficiency"),
                        comment=body.get("comment", ""),
                    )
                    return self._send_json(ack)
            if method == "GET" and parts == ["analysis"]:
                return self._send_json(self.service.analysis())
            if method == "GET" and len(parts) == 4 and parts[0] == "cases" and parts[2] == "images":
                index = int(parts[3].removesuffix(".png"))
                data = self.service.case_image(parts[1], index)
                self.send_response(200)
                self.send_header("Content-Type", "image/png")
                self.send_header("Content-Length", str(len(data)))
                self.send_header("Access-Control-Allow-Origin", "*")
                self.end_headers()
                self.wfile.write(data)
                return None
            return self._send_json({"error": "not found"}, status=404)
        except ProtocolError as exc:
            return self._send_json({"error": str(exc)}, status=exc.status)
        except (KeyError, IndexError):
            return self._send_json({"error": "not found"}, status=404)
        except ValueError as exc:
            return self._send_json({"error": str(exc)}, status=400)

    def do_GET(self):
        self._route("GET")

    def do_POST(self):
        self._route("POST")

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()


def serve_study(cfg: StudyConfig, port: int, log_path=None):
    """Build the HTTP server (caller starts serve_forever / shutdown)."""
    log = EventLog.load(log_path) if log_path else EventLog()
    service = StudyService(cfg=cfg, log=log)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    return server, service
