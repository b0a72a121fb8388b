# Ergodic experiments package for RandCF
# Contains orbit simulation and Monte Carlo statistics
