"""Shared column schemas for the gateway corpus and the feature file."""

GATEWAY_CSV_COLUMNS = [
    "timestamp", "station_id", "temp_c", "rh_pct", "wind_kmh", "wind_dir", "rain_mm",
]

WIND_SECTORS = [
    "N", "NNE", "NE", "ENE", "E", "ESE", "SE", "SSE",
    "S", "SSW", "SW", "WSW", "W", "WNW", "NW", "NNW",
]

# The 9 model features, in feature-file order.
FEATURE_COLUMNS = [
    "temp_c", "rh_pct", "temp_k", "rh_frac",
    "roll24_rh_mean", "roll24_rh_std", "roll24_tk_mean", "hours_wet_24h",
    "station_code",
]

TARGET_COLUMN = "target_cr_um_yr"

FEATURE_CSV_COLUMNS = ["timestamp", "station_id", *FEATURE_COLUMNS, TARGET_COLUMN]

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M"
