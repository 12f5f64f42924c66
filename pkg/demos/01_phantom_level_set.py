"""Render the benchmark phantom and look at its level sets.

The phantom is piecewise constant, so every level set is a union of the
shapes whose intensity reaches the threshold.
"""
import numpy as np

from tvlevelset import default_phantom_spec, extract_level_set, render_phantom, save_image, save_mask

spec = default_phantom_spec()
img = render_phantom(spec)
print("phantom", img.shape, "intensities", np.unique(img))

for gamma in (30.0, 70.0, 100.0, 130.0):
    mask = extract_level_set(img, gamma)
    print(f"gamma={gamma:5.1f}: {mask.sum():4d} pixels in the level set")

save_image(img, "phantom.pgm")
save_mask(extract_level_set(img, 70.0), "phantom_mask.pgm")
print("wrote phantom.pgm and phantom_mask.pgm")
