"""Read-only HTTP service backing the tree-explorer UI: tree building,
interactive leaf expansion, and node-name search over a trained model."""

from __future__ import annotations

import threading
from collections import OrderedDict
from uuid import uuid4

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import tracer

SESSION_CAPACITY = 256


class TreeSessionStore:
    """LRU map tree_id -> AssociationTree, safe under concurrent requests."""

    def __init__(self, capacity=SESSION_CAPACITY):
        self._capacity = capacity
        self._trees = OrderedDict()
        self._lock = threading.Lock()

    def put(self, tree) -> str:
        tree_id = uuid4().hex
        with self._lock:
            self._trees[tree_id] = tree
            while len(self._trees) > self._capacity:
                self._trees.popitem(last=False)
        return tree_id

    def get(self, tree_id):
        with self._lock:
            tree = self._trees.get(tree_id)
            if tree is not None:
                self._trees.move_to_end(tree_id)
            return tree

    def replace(self, tree_id, tree):
        with self._lock:
            if tree_id in self._trees:
                self._trees[tree_id] = tree


class ExpandRequest(BaseModel):
    tree_id: str
    position: int
    degree: int = 3


def create_app(a_hat, names, labels=None) -> FastAPI:
    """App over immutable artifacts: correlation matrix plus node names."""
    app = FastAPI(title="kgtrace tree explorer")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = TreeSessionStore()
    name_to_id = {n: i for i, n in enumerate(names)}

    def payload(tree_id, tree):
        doc = tracer.tree_to_json(tree, names=names, labels=labels)
        doc["tree_id"] = tree_id
        return doc

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/nodes")
    def search_nodes(q: str = ""):
        if not q:
            return {"names": []}
        ql = q.lower()
        prefix = [n for n in names if n.lower().startswith(ql)]
        inner = [n for n in names if ql in n.lower() and not n.lower().startswith(ql)]
        return {"names": prefix + inner}

    @app.get("/api/tree")
    def get_tree(node: str, levels: int = 2, degree: int = 3):
        if node not in name_to_id:
            raise HTTPException(404, f"unknown node {node!r}")
        try:
            tree = tracer.build_association_tree(
                name_to_id[node], levels, degree, a_hat
            )
        except tracer.TracerError as e:
            raise HTTPException(400, str(e))
        tree_id = store.put(tree)
        return payload(tree_id, tree)

    @app.post("/api/tree/expand")
    def expand(req: ExpandRequest):
        tree = store.get(req.tree_id)
        if tree is None:
            raise HTTPException(404, f"unknown tree {req.tree_id!r}")
        if not 0 <= req.position < len(tree.nodes):
            raise HTTPException(400, f"unknown position {req.position}")
        if tree.nodes[req.position].children:
            raise HTTPException(409, f"position {req.position} is not a leaf")
        try:
            new_tree = tracer.expand_node(tree, req.position, req.degree, a_hat)
        except tracer.TracerError as e:
            raise HTTPException(400, str(e))
        store.replace(req.tree_id, new_tree)
        return payload(req.tree_id, new_tree)

    return app
