# Expansion package for RandCF
# Contains the maps K and R, convergents, the lemma audit and digit steering
