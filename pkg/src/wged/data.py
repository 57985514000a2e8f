"""Embedded datasets."""

# Strengths of 1.5 cm glass fibres measured at the National Physical
# Laboratory (Smith & Naylor, 1987); units were not reported.
GLASS_FIBRE = (
    0.55, 0.93, 1.25, 1.36, 1.49, 1.52, 1.58, 1.61, 1.64,
    1.68, 1.73, 1.81, 2.00, 0.74, 1.04, 1.27, 1.39, 1.49,
    1.53, 1.59, 1.61, 1.66, 1.68, 1.76, 1.82, 2.01, 0.77,
    1.11, 1.28, 1.42, 1.50, 1.54, 1.60, 1.62, 1.66, 1.69,
    1.76, 1.84, 2.24, 0.81, 1.13, 1.29, 1.48, 1.50, 1.55,
    1.61, 1.62, 1.66, 1.70, 1.77, 1.84, 0.84, 1.24, 1.30,
    1.48, 1.51, 1.55, 1.61, 1.63, 1.67, 1.70, 1.78, 1.89,
)

DATASETS = {
    "glassfibre": {
        "values": GLASS_FIBRE,
        "source": "Smith & Naylor (1987), strengths of 1.5 cm glass fibres",
        "units": "unknown",
    },
}
