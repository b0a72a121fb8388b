# Exporters package for RandCF
# Writes traces, densities, histograms and verification reports as JSON, CSV and Excel
