"""Translation surfaces obtained by unfolding generalized polygons."""
