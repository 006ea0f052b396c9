"""Scene-level environment: time of day and weather.

Sun angles follow a fixed simple model (latitude 35 deg, zero declination);
only determinism and the monotone elevation-to-illumination mapping matter
at desk scale, not astronomical accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WEATHER_KINDS = ("clear", "fog", "rain", "snow")
LATITUDE_DEG = 35.0
AMBIENT_FLOOR = 0.08


@dataclass
class EnvironmentState:
    time_of_day: float = 12.0   # hours, [0, 24)
    weather: str = "clear"
    intensity: float = 0.0      # [0, 1]; forced to 0 for clear weather

    def __post_init__(self):
        if not 0.0 <= self.time_of_day < 24.0:
            raise ValueError("time_of_day must lie in [0, 24)")
        if self.weather not in WEATHER_KINDS:
            raise ValueError(f"weather must be one of {WEATHER_KINDS}")
        if not 0.0 <= self.intensity <= 1.0:
            raise ValueError("intensity must lie in [0, 1]")
        if self.weather == "clear":
            self.intensity = 0.0

    @property
    def sun_elevation_deg(self) -> float:
        hour_angle = np.deg2rad((self.time_of_day - 12.0) * 15.0)
        s = np.cos(np.deg2rad(LATITUDE_DEG)) * np.cos(hour_angle)
        return float(np.degrees(np.arcsin(np.clip(s, -1.0, 1.0))))

    @property
    def sun_azimuth_deg(self) -> float:
        hour_angle = np.deg2rad((self.time_of_day - 12.0) * 15.0)
        az = np.arctan2(np.sin(hour_angle),
                        -np.sin(np.deg2rad(LATITUDE_DEG)) * np.cos(hour_angle))
        return float(np.degrees(az) % 360.0)

    def to_dict(self) -> dict:
        return {"time_of_day": self.time_of_day, "weather": self.weather,
                "intensity": self.intensity}

    @staticmethod
    def from_dict(d: dict) -> "EnvironmentState":
        return EnvironmentState(time_of_day=float(d.get("time_of_day", 12.0)),
                                weather=d.get("weather", "clear"),
                                intensity=float(d.get("intensity", 0.0)))


def illumination_scale(env: EnvironmentState) -> float:
    """Global light multiplier in [AMBIENT_FLOOR, 1], monotone in elevation."""
    lift = max(np.sin(np.deg2rad(env.sun_elevation_deg)), 0.0)
    return AMBIENT_FLOOR + (1.0 - AMBIENT_FLOOR) * float(lift)


def sun_direction(env: EnvironmentState) -> np.ndarray:
    """Unit vector pointing from the scene toward the sun (z up)."""
    el = np.deg2rad(env.sun_elevation_deg)
    az = np.deg2rad(env.sun_azimuth_deg)
    return np.array([np.cos(el) * np.cos(az), np.cos(el) * np.sin(az), np.sin(el)])
