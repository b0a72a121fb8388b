# Processors package for RandCF
# Contains the verification suite behind the verify command
