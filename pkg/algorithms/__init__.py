# Solvers, gadget constructions and structural checks
