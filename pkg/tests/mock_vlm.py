"""Local mock of the generic vision-language endpoint contract:
POST {"model", "prompt", "image_base64"} -> {"text": ...}.

Replies are scripted per test: each element of ``script`` is either a reply
string or an integer HTTP status to fail with.
"""

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer


class MockVlmServer:
    def __init__(self, script, require_key="test-key"):
        self.script = list(script)
        self.require_key = require_key
        self.requests = []
        self._lock = threading.Lock()
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length)) if length else {}
                with outer._lock:
                    outer.requests.append(
                        {"body": body, "auth": self.headers.get("Authorization")}
                    )
                    step = outer.script.pop(0) if outer.script else "Safe. Default."
                if outer.require_key and self.headers.get(
                    "Authorization"
                ) != f"Bearer {outer.require_key}":
                    self._reply(401, {"error": "bad credentials"})
                    return
                if isinstance(step, int):
                    self._reply(step, {"error": f"injected {step}"})
                else:
                    self._reply(200, {"text": step})

            def _reply(self, status, doc):
                payload = json.dumps(doc).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        self._server = HTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self):
        host, port = self._server.server_address
        return f"http://{host}:{port}/verify"

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)
