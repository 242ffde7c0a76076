"""Platform comparison: the chi/kappa figure of merit for pulsed waveguides.

For quantum-Kerr-soliton encodings, the quality number is the ratio of the
single-mode self-phase-modulation rate to the loss rate. The group velocity
cancels; what remains involves only the nonlinear coefficient, the
attenuation, the carrier frequency, and the pulse length.
"""

from kerrcubic import BUILTIN_MATERIALS, MaterialParams, envelope_overlap, figure_of_merit

print(f"{'platform':25s} {'gamma_nl':>9s} {'alpha_att':>10s} {'lambda':>8s} {'chi/kappa':>11s}")
for m in BUILTIN_MATERIALS:
    print(f"{m.name:25s} {m.gamma_nl:9.1f} {m.alpha_att:10.1f} "
          f"{m.wavelength*1e6:7.2f}u {figure_of_merit(m):11.3e}")

# the single-mode picture rests on the envelopes being photon-number
# insensitive for highly displaced states: +-2 sigma around nbar = 100
mat = MaterialParams(name="demo", gamma_nl=280.0, alpha_att=400.0,
                     wavelength=1.54e-6, t_fwhm=100e-15, v_g=1.2e8, gvd=2.0e-2)
print("\nenvelope overlap h_n . h_nbar at nbar = 100, n = nbar + 2 sqrt(nbar):",
      f"{envelope_overlap(120, 100, mat):.5f}")
print("at nbar = 10^6, n = nbar + 2 sqrt(nbar):",
      f"{envelope_overlap(10**6 + 2000, 10**6, mat):.9f}")
