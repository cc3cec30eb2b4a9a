import json
import random
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from sbs_forecast.graph import WordNetwork

DATA = Path(__file__).parent / "data"
FIXTURE = DATA / "fixture"


@pytest.fixture
def fixture_dir():
    return FIXTURE


def random_connected_network(rng: random.Random, n: int, max_weight: int = 20, p: float = 0.35) -> WordNetwork:
    """Random spanning tree plus extra arcs with probability p."""
    names = [f"n{i}" for i in range(n)]
    rng.shuffle(names)
    arcs = {}
    for i in range(1, n):
        j = rng.randrange(i)
        arcs[tuple(sorted((names[i], names[j])))] = rng.randint(1, max_weight)
    for i in range(n):
        for j in range(i + 1, n):
            key = tuple(sorted((names[i], names[j])))
            if key not in arcs and rng.random() < p:
                arcs[key] = rng.randint(1, max_weight)
    return WordNetwork(arcs=arcs)


class _MockNewsApi(BaseHTTPRequestHandler):
    pages: list = []
    status = 200
    requests: list = []

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        type(self).requests.append(body)
        if self.status != 200:
            self.send_response(self.status)
            self.end_headers()
            return
        page = body.get("articlesPage", 1)
        results = self.pages[page - 1] if page <= len(self.pages) else []
        payload = json.dumps({"articles": {"results": results, "page": page, "pages": len(self.pages)}})
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(payload.encode())

    def log_message(self, *args):
        pass


@pytest.fixture
def news_server():
    handler = type("Handler", (_MockNewsApi,), {"pages": [], "status": 200, "requests": []})
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    handler.url = f"http://127.0.0.1:{server.server_address[1]}/api/v1/article/getArticles"
    yield handler
    server.shutdown()
    server.server_close()


_CRITERIA: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and not report.failed):
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "failed": []})
    if report.failed:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "FAIL" if entry["failed"] else "PASS"
        line = f"criterion {number}: {status}  {entry['title']}"
        if entry["failed"]:
            line += "  [failed: " + ", ".join(entry["failed"]) + "]"
        terminalreporter.write_line(line)
