# Wiener Lab - command-line entry point
#
# Simulation and numerical-analysis laboratory for rate-constrained causal
# coding of the Wiener process:
# - sign-of-innovation threshold codec and its analytic distortion
# - uniform sampling with greedy Lloyd-Max or Gaussian test-channel compression
# - finite-N informational distortion-rate bounds and their limit
# - look-ahead and fixed-delay decoders, rate-limited impulse control
#
# Usage: python main.py <command> [options]   (see `python main.py --help`)

from wiener_lab.cli.main import main

if __name__ == "__main__":
    main()
