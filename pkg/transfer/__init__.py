# Transfer operator package for RandCF
# Contains the random Perron-Frobenius operator, its density solver and the Inoue conditions
