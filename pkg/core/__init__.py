# Core package for RandCF
# Domain types shared by the expansion, transfer and ergodic packages
