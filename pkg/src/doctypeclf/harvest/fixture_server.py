"""A local HTTP server that imitates the three APIs over the bundled fixture corpus.

Used by the test-suite and for offline demos::

    with FixtureServer() as srv:
        os.environ["CROSSREF_BASE_URL"] = srv.url("crossref")

Pages are capped at ``MAX_PAGE`` records regardless of the requested size.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from importlib import resources
from typing import Optional
from urllib.parse import parse_qs, urlparse
from xml.sax.saxutils import escape

MAX_PAGE = 20


def load_fixture(source: str) -> list[dict]:
    text = resources.files("doctypeclf").joinpath(f"data/fixtures/{source}.jsonl").read_text("utf-8")
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def _crossref_year(item: dict) -> Optional[int]:
    parts = (item.get("published") or {}).get("date-parts") or [[None]]
    return parts[0][0]


def _year_window(filter_str: str, lo_name: str, hi_name: str) -> tuple[int, int]:
    lo, hi = 0, 9999
    for part in filter_str.split(","):
        name, _, value = part.partition(":")
        if name == lo_name:
            lo = int(value[:4])
        elif name == hi_name:
            hi = int(value[:4])
    return lo, hi


def pubmed_xml(records: list[dict]) -> str:
    out = ['<?xml version="1.0" ?>', "<PubmedArticleSet>"]
    for rec in records:
        types = "".join(f"<PublicationType>{escape(t)}</PublicationType>"
                        for t in rec.get("publication_types", []))
        ids = f'<ArticleId IdType="pubmed">{escape(rec["pmid"])}</ArticleId>'
        if rec.get("doi"):
            ids += f'<ArticleId IdType="doi">{escape(rec["doi"])}</ArticleId>'
        out.append(
            "<PubmedArticle><MedlineCitation><PMID>{pmid}</PMID><Article>"
            "<PublicationTypeList>{types}</PublicationTypeList></Article></MedlineCitation>"
            "<PubmedData><ArticleIdList>{ids}</ArticleIdList></PubmedData>"
            "</PubmedArticle>".format(pmid=escape(rec["pmid"]), types=types, ids=ids)
        )
    out.append("</PubmedArticleSet>")
    return "".join(out)


class FixtureServer:
    """Serve the fixture corpus on ``127.0.0.1`` in a background thread.

    ``fail_times``/``fail_status`` make the first N requests fail, which is how the
    retry and rate-limit paths are exercised.
    """

    def __init__(self, corpus: Optional[dict] = None, fail_times: int = 0,
                 fail_status: int = 429, malformed: bool = False):
        self.corpus = corpus or {s: load_fixture(s) for s in ("crossref", "openalex", "pubmed")}
        self.fail_times = fail_times
        self.fail_status = fail_status
        self.malformed = malformed
        self.requests: list[str] = []
        self._lock = threading.Lock()
        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), self._handler())
        self._thread: Optional[threading.Thread] = None

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    def url(self, source: str) -> str:
        return f"http://127.0.0.1:{self.port}/{source}"

    def start(self) -> "FixtureServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()

    def _handler(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_GET(self):
                with server._lock:
                    server.requests.append(self.path)
                    failing = server.fail_times > 0
                    if failing:
                        server.fail_times -= 1
                if failing:
                    return self._send(server.fail_status, b"{}", "application/json")
                parsed = urlparse(self.path)
                q = {k: v[-1] for k, v in parse_qs(parsed.query).items()}
                route = parsed.path.rstrip("/")
                if server.malformed:
                    return self._json({"unexpected": True})
                if route == "/crossref/works":
                    return self._json(server._crossref(q))
                if route == "/openalex/works":
                    return self._json(server._openalex(q))
                if route == "/pubmed/esearch.fcgi":
                    return self._json(server._esearch(q))
                if route == "/pubmed/efetch.fcgi":
                    body = pubmed_xml(server._efetch(q)).encode("utf-8")
                    return self._send(200, body, "text/xml")
                self._send(404, b"not found", "text/plain")

            def _json(self, obj):
                self._send(200, json.dumps(obj).encode("utf-8"), "application/json")

            def _send(self, status, body, ctype):
                self.send_response(status)
                self.send_header("Content-Type", ctype)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        return Handler

    @staticmethod
    def _page(items: list, cursor: str, size: int) -> tuple[list, Optional[str]]:
        start = 0 if cursor in ("*", "") else int(cursor.lstrip("c"))
        size = max(1, min(size, MAX_PAGE))
        page = items[start:start + size]
        nxt = f"c{start + size}" if start + size < len(items) else None
        return page, nxt

    def _crossref(self, q: dict) -> dict:
        lo, hi = _year_window(q.get("filter", ""), "from-pub-date", "until-pub-date")
        items = [it for it in self.corpus["crossref"]
                 if _crossref_year(it) is None or lo <= _crossref_year(it) <= hi]
        page, nxt = self._page(items, q.get("cursor", "*"), int(q.get("rows", MAX_PAGE)))
        message = {"items": page, "total-results": len(items)}
        # real Crossref keeps returning a cursor; an empty page ends the walk
        message["next-cursor"] = nxt or f"c{len(items)}"
        return {"status": "ok", "message-type": "work-list", "message": message}

    def _openalex(self, q: dict) -> dict:
        lo, hi = _year_window(q.get("filter", ""), "from_publication_date", "to_publication_date")
        items = [it for it in self.corpus["openalex"]
                 if it.get("publication_year") is None or lo <= it["publication_year"] <= hi]
        page, nxt = self._page(items, q.get("cursor", "*"), int(q.get("per-page", MAX_PAGE)))
        return {"meta": {"count": len(items), "next_cursor": nxt}, "results": page}

    def _esearch(self, q: dict) -> dict:
        return {"esearchresult": {"count": str(len(self.corpus["pubmed"])),
                                  "webenv": "FIXTURE", "querykey": "1", "idlist": []}}

    def _efetch(self, q: dict) -> list:
        start = int(q.get("retstart", 0))
        size = max(1, min(int(q.get("retmax", MAX_PAGE)), MAX_PAGE))
        return self.corpus["pubmed"][start:start + size]
