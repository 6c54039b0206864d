"""Drive the HTTP endpoints in-process with the FastAPI test client.

The same app serves real sockets via `mathfind serve`; here we exercise the
contract without opening a port, including backend failover: two dead
render backends, and the reply is still definitive (the built-in parser
answers).
"""

import importlib.resources
import json

from fastapi.testclient import TestClient

from mathfind import corpus
from mathfind.service import BackendPool, create_app

corpus_path = importlib.resources.files("mathfind").joinpath(
    "data/acceptance_corpus.jsonl"
)
docs, _, corpus_hash = corpus.ingest_path(str(corpus_path))
snapshot = corpus.build_snapshot(docs, corpus_hash)

dead_backends = BackendPool(["http://127.0.0.1:9", "http://127.0.0.1:10"])
client = TestClient(create_app(snapshot, dead_backends))

print("GET /healthz")
print(" ", client.get("/healthz").json(), "\n")

print("POST /api/render {latex: 'x_1^2'}  (all backends down -> local parse)")
print(" ", client.post("/api/render", json={"latex": "x_1^2"}).json(), "\n")

print("POST /api/render {latex: 'a?x^2'}  (wildcards need query mode)")
reply = client.post("/api/render", json={"latex": "a?x^2"})
print(f"  {reply.status_code} ->", reply.json(), "\n")

print("POST /api/search {text: 'Gröbner', math: 'a?x^2+b?y^2+?z'}")
body = client.post(
    "/api/search", json={"text": "Gröbner", "math": "a?x^2+b?y^2+?z"}
).json()
print(json.dumps(body, indent=2, ensure_ascii=False)[:900])
