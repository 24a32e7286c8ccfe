"""Test scripts for the othellonet package.

Run the suite with pytest, or a single module at acceptance scale:
    python -m tests.test_board --positions 100000 --perft-depth 6
    python -m tests.test_nn_gradients --configs 20 --probes 8
    python -m tests.test_nn_training --examples 512 --epochs 200
    python -m tests.test_wthor --wthor data/wthor
    python -m tests.test_search --positions 1000 --depth 3
    python -m tests.test_harness --count 40 --workers 4
"""
