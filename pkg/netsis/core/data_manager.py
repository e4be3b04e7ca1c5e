"""Trajectory store using DuckDB for both in-memory and out-of-core modes.

A sweep produces one trajectory per grid cell. The store keeps them in a
single long-format table ``trajectories(cell_id, k, node, x)`` plus the
equilibrium each cell is measured against, ``targets(cell_id, node, target)``,
and answers summary queries with SQL.

In-memory mode registers pandas DataFrames with DuckDB directly; out-of-core
mode writes one Parquet file per cell and queries the files through a view.
"""

from __future__ import annotations

import logging
import tempfile
from pathlib import Path

import duckdb
import numpy as np
import pandas as pd
import pyarrow as pa
import pyarrow.parquet as pq

from netsis.core.config import DEFAULTS

logger = logging.getLogger(__name__)


class TrajectoryStore:
    """Stores sweep trajectories and queries them via DuckDB.

    Attributes:
        out_of_core: Whether trajectories are written to Parquet
        cache_dir: Directory for Parquet files (out-of-core mode)
        compression: Parquet compression algorithm
    """

    def __init__(
        self,
        out_of_core: bool = DEFAULTS.OUT_OF_CORE,
        cache_dir: Path | None = None,
        compression: str = DEFAULTS.CACHE_COMPRESSION,
    ):
        """Initialize the store.

        Args:
            out_of_core: If True, write each trajectory to Parquet and query from disk.
            cache_dir: Directory for Parquet files. If None, uses a temp directory.
            compression: Parquet compression algorithm (zstd, snappy, gzip, none).
        """
        self.out_of_core = out_of_core
        self.cache_dir = Path(cache_dir) if cache_dir else Path(tempfile.mkdtemp(prefix="netsis_"))
        self.compression = compression
        self.conn = duckdb.connect(":memory:")

        self._frames: list[pd.DataFrame] = []
        self._targets: list[pd.DataFrame] = []
        self._cells: list[str] = []
        self._dirty = True

    def _parquet_path(self, cell_id: str) -> Path:
        return self.cache_dir / f"traj_{cell_id}.parquet"

    @staticmethod
    def _long_frame(cell_id: str, states: np.ndarray) -> pd.DataFrame:
        steps, n = states.shape
        return pd.DataFrame(
            {
                "cell_id": cell_id,
                "k": np.repeat(np.arange(steps, dtype=np.int64), n),
                "node": np.tile(np.arange(n, dtype=np.int64), steps),
                "x": states.reshape(-1),
            }
        )

    def register_trajectory(self, cell_id: str, states: np.ndarray, target: np.ndarray) -> None:
        """Add one cell's trajectory and the equilibrium it converges towards.

        Args:
            cell_id: Unique cell identifier
            states: (K+1) x n array of states
            target: Equilibrium (x* or the zero vector), length n
        """
        if cell_id in self._cells:
            raise ValueError(f"cell {cell_id!r} already registered")
        states = np.asarray(states, dtype=np.float64)
        frame = self._long_frame(cell_id, states)
        target_frame = pd.DataFrame(
            {
                "cell_id": cell_id,
                "node": np.arange(states.shape[1], dtype=np.int64),
                "target": np.asarray(target, dtype=np.float64),
            }
        )
        self._cells.append(cell_id)
        self._targets.append(target_frame)

        if self.out_of_core:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            pq.write_table(
                pa.Table.from_pandas(frame, preserve_index=False),
                self._parquet_path(cell_id),
                compression=self.compression,
            )
        else:
            self._frames.append(frame)
        self._dirty = True

    def _refresh(self) -> None:
        if not self._dirty:
            return
        for name in ("trajectories", "targets"):
            self.conn.execute(f"DROP VIEW IF EXISTS {name}")
            try:
                self.conn.unregister(f"{name}_table")
            except Exception:
                pass  # not registered yet

        empty = pd.DataFrame(
            {
                "cell_id": pd.Series(dtype="object"),
                "k": pd.Series(dtype="int64"),
                "node": pd.Series(dtype="int64"),
                "x": pd.Series(dtype="float64"),
            }
        )
        if self.out_of_core and self._cells:
            files = ", ".join(f"'{self._parquet_path(cell).as_posix()}'" for cell in self._cells)
            self.conn.execute(f"CREATE VIEW trajectories AS SELECT * FROM read_parquet([{files}])")
        else:
            frames = pd.concat(self._frames, ignore_index=True) if self._frames else empty
            self.conn.register("trajectories_table", frames)
            self.conn.execute("CREATE VIEW trajectories AS SELECT * FROM trajectories_table")

        targets = (
            pd.concat(self._targets, ignore_index=True)
            if self._targets
            else pd.DataFrame({"cell_id": [], "node": [], "target": []})
        )
        self.conn.register("targets_table", targets)
        self.conn.execute("CREATE VIEW targets AS SELECT * FROM targets_table")
        self._dirty = False

    @property
    def cell_ids(self) -> list[str]:
        return list(self._cells)

    def query_steps_to_tolerance(self, tol: float = DEFAULTS.CONVERGENCE_TOL) -> dict[str, int | None]:
        """First step at which each cell's trajectory is within tol of its target.

        Args:
            tol: Threshold on ||x(k) - target||_inf

        Returns:
            Mapping cell_id -> step, None for cells that never get within tol
        """
        self._refresh()
        rows = self.conn.execute(
            """
            SELECT cell_id, MIN(k) AS steps
            FROM (
                SELECT t.cell_id, t.k, MAX(ABS(t.x - g.target)) AS err
                FROM trajectories t
                JOIN targets g ON t.cell_id = g.cell_id AND t.node = g.node
                GROUP BY t.cell_id, t.k
            )
            WHERE err < ?
            GROUP BY cell_id
            """,
            [tol],
        ).fetchall()
        found = {cell: int(steps) for cell, steps in rows}
        return {cell: found.get(cell) for cell in self._cells}

    def get_row_count(self) -> int:
        """Total (cell, k, node) rows stored."""
        self._refresh()
        result = self.conn.execute("SELECT COUNT(*) FROM trajectories").fetchone()
        return int(result[0]) if result else 0

    def get_cache_size_mb(self) -> float:
        """Parquet cache size in MB (0 in in-memory mode)."""
        if not self.out_of_core:
            return 0.0
        return sum(f.stat().st_size for f in self.cache_dir.glob("traj_*.parquet")) / (1024 * 1024)

    def clear(self) -> None:
        """Drop all trajectories, including cached Parquet files."""
        for f in self.cache_dir.glob("traj_*.parquet"):
            try:
                f.unlink()
            except OSError:
                pass
        self._frames.clear()
        self._targets.clear()
        self._cells.clear()
        self._dirty = True

    def cleanup(self) -> None:
        """Close the DuckDB connection."""
        try:
            self.conn.close()
        except Exception:
            pass
