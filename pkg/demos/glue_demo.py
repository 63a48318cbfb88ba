"""Glue two point sets along a pairing and extend the pairing outward.

The pairing here reverses the order of three points on a line, which no
map of the line can extend with bounded distortion.  The way out is a
pair of maps into one common space that agree through the pairing; the
package produces them with distortion certified against 9 * d_f + 2.
"""

import numpy as np

from metric_union import external_extend, glue_instance, glued_metric

U = np.array([[0.0], [1.0], [2.0]])
V = np.array([[0.0], [2.0], [1.0]])   # the same line, order reversed
G = glue_instance(U, V, a_idx=[0, 1, 2], b_idx=[0, 1, 2],
                  pairing=[0, 1, 2])
print(f"pairing distortion d_f = {G.d_f} (stored V' rescaled by "
      f"{G.v_scale})")

X, P = glued_metric(G)
print(f"\nglued space: {X.n} points (matched pairs merged)")
print("labels:", X.labels)
print("quotient metric:")
print(np.array_str(X.dist, precision=4))

ext = external_extend(G)
print(f"\ncommon-target maps: f1 into R^{ext.f1.dim}, f2 into "
      f"R^{ext.f2.dim}")
print(f"distortion f1 = {ext.distortion_f1:.4f}, "
      f"f2 = {ext.distortion_f2:.4f}, certified bound = {ext.bound}")

agree = np.array_equal(ext.f1.points[G.a_idx], ext.f2.points[G.pairing])
print(f"paired rows share identical images: {agree}")

print("\nf1 images of U rows:")
print(np.array_str(ext.f1.points, precision=4))
print("f2 images of (normalized) V rows:")
print(np.array_str(ext.f2.points, precision=4))
