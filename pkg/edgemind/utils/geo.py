"""
Geographic helpers: great-circle distances and fiber propagation delays.
"""
import numpy as np

EARTH_RADIUS_M = 6371000.0
SPEED_OF_LIGHT_M_S = 299792458.0
FIBER_REFRACTIVE_INDEX = 1.468
FIBER_SPEED_M_S = SPEED_OF_LIGHT_M_S / FIBER_REFRACTIVE_INDEX


def haversine_distance(lats1, lons1, lats2, lons2):
    """
    Distance in meters between points given in decimal degrees.

    Parameters:
    -----------
    lats1, lons1 : float or array-like
        Latitudes and longitudes of the first points
    lats2, lons2 : float or array-like
        Latitudes and longitudes of the second points (broadcast)

    Returns:
    --------
    ndarray : Distances in meters
    """
    lats1, lons1, lats2, lons2 = map(np.radians, map(np.asarray, [lats1, lons1, lats2, lons2]))

    dlat = lats2 - lats1
    dlon = lons2 - lons1

    a = np.sin(dlat / 2) ** 2 + np.cos(lats1) * np.cos(lats2) * np.sin(dlon / 2) ** 2
    c = 2 * np.arctan2(np.sqrt(a), np.sqrt(1 - a))

    return EARTH_RADIUS_M * c


def fiber_delay_us(distance_m):
    """One-way propagation delay over fiber, in microseconds."""
    return np.asarray(distance_m) / FIBER_SPEED_M_S * 1e6
