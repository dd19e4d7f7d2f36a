"""Stored cells per plane for each backend."""
from fastids import bench

if __name__ == "__main__":
    for row in bench.memory_table((32, 64, 128, 256)):
        print(f"Rsn {row['rsn']:4d}  {row['backend']:8}  {row['cells']:6d} cells")
