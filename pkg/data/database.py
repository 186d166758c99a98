"""
SQLite census store using SQLAlchemy Core.
One catalog per vertex count; saving again replaces it.
"""

from __future__ import annotations

from datetime import datetime
from typing import Dict, List, Optional

from sqlalchemy import (
    create_engine, text, MetaData, Table, Column,
    Integer, String, DateTime, Boolean
)
from sqlalchemy.engine import Engine

from core import config
from core.enumeration import Catalog, CatalogRecord, decode_key
from core.errors import PreconditionError
from core.homology import HomologyProfile
from data.formats import render_edges, render_gluings
from utils.logger import get_logger

log = get_logger(__name__)

# ─── ENGINE ───────────────────────────────────────────────────────────────────
_engines: Dict[str, Engine] = {}
metadata = MetaData()


def get_engine(path: Optional[str] = None) -> Engine:
    path = str(path or config.DB_PATH)
    if path not in _engines:
        _engines[path] = create_engine(f"sqlite:///{path}", echo=False)
    return _engines[path]


# ─── TABLES ───────────────────────────────────────────────────────────────────
catalogs_table = Table(
    "catalogs", metadata,
    Column("id",             Integer, primary_key=True, autoincrement=True),
    Column("vertices",       Integer, nullable=False, unique=True),
    Column("format_version", Integer, nullable=False),
    Column("histogram",      String(200)),                 # "2 5 3 1"
    Column("record_count",   Integer, default=0),
    Column("saved_at",       DateTime),
)

catalog_records_table = Table(
    "catalog_records", metadata,
    Column("id",          Integer, primary_key=True, autoincrement=True),
    Column("catalog_id",  Integer, nullable=False),
    Column("position",    Integer, nullable=False),
    Column("key_hex",     String(200), nullable=False),
    Column("edges",       String(200)),
    Column("gluings",     String(200)),
    Column("regions",     Integer),
    Column("betti",       String(50)),
    Column("torsion_1",   String(100)),
    Column("torsion_2",   String(100)),
    Column("acyclic",     Boolean, default=False),
    Column("canceling",   Boolean, nullable=True),        # NULL = not checked
)


def init_db(path: Optional[str] = None) -> None:
    """Create all tables if they don't exist."""
    metadata.create_all(get_engine(path))
    log.info("[DB] census store initialised at %s", path or config.DB_PATH)


def _csv(values) -> str:
    return ",".join(map(str, values))


def _ints(value: Optional[str]):
    return tuple(int(x) for x in value.split(",")) if value else ()


# ─── CATALOG CRUD ─────────────────────────────────────────────────────────────

def save_catalog(catalog: Catalog, path: Optional[str] = None) -> int:
    init_db(path)
    row = {
        "vertices":       catalog.vertex_count,
        "format_version": config.CATALOG_FORMAT_VERSION,
        "histogram":      " ".join(map(str, catalog.histogram_row())),
        "record_count":   len(catalog),
        "saved_at":       datetime.now(),
    }
    with get_engine(path).begin() as conn:
        existing = conn.execute(
            catalogs_table.select()
            .where(catalogs_table.c.vertices == catalog.vertex_count)
        ).fetchone()
        if existing:
            catalog_id = existing.id
            conn.execute(
                catalogs_table.update()
                .where(catalogs_table.c.id == catalog_id)
                .values(**row)
            )
            conn.execute(
                catalog_records_table.delete()
                .where(catalog_records_table.c.catalog_id == catalog_id)
            )
        else:
            catalog_id = conn.execute(catalogs_table.insert().values(**row)).inserted_primary_key[0]

        records = [
            {
                "catalog_id": catalog_id,
                "position":   i,
                "key_hex":    rec.key_hex,
                "edges":      render_edges(rec.piece.graph),
                "gluings":    render_gluings(rec.piece),
                "regions":    rec.region_count,
                "betti":      _csv(rec.profile.betti),
                "torsion_1":  _csv(rec.profile.torsion_1),
                "torsion_2":  _csv(rec.profile.torsion_2),
                "acyclic":    rec.acyclic,
                "canceling":  rec.canceling,
            }
            for i, rec in enumerate(catalog.records)
        ]
        if records:
            conn.execute(catalog_records_table.insert(), records)
    log.info("[DB] catalog n=%d saved id=%s (%d records)", catalog.vertex_count, catalog_id, len(catalog))
    return catalog_id


def load_catalog(vertices: int, path: Optional[str] = None) -> Catalog:
    init_db(path)
    with get_engine(path).connect() as conn:
        head = conn.execute(
            catalogs_table.select().where(catalogs_table.c.vertices == vertices)
        ).fetchone()
        if head is None:
            raise PreconditionError(f"no catalog with {vertices} vertices in {path or config.DB_PATH}")
        rows = conn.execute(
            catalog_records_table.select()
            .where(catalog_records_table.c.catalog_id == head.id)
            .order_by(catalog_records_table.c.position)
        ).fetchall()

    records = []
    for r in rows:
        key = bytes.fromhex(r.key_hex)
        profile = HomologyProfile(_ints(r.betti), _ints(r.torsion_1), _ints(r.torsion_2))
        records.append(CatalogRecord(key, decode_key(key), r.regions, profile, r.canceling))
    return Catalog(vertices, tuple(records))


def list_catalogs(path: Optional[str] = None) -> List[Dict]:
    init_db(path)
    with get_engine(path).connect() as conn:
        rows = conn.execute(
            catalogs_table.select().order_by(catalogs_table.c.vertices)
        ).fetchall()
    return [dict(r._mapping) for r in rows]


def record_count(path: Optional[str] = None) -> int:
    init_db(path)
    with get_engine(path).connect() as conn:
        row = conn.execute(text("SELECT COUNT(*) FROM catalog_records")).fetchone()
    return row[0] if row else 0
