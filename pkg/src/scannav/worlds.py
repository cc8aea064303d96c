"""Reference worlds: an empty room, an office floor and a loop corridor."""

from __future__ import annotations

import numpy as np

from scannav.sensor import World


def rectangle(x0, y0, x1, y1) -> np.ndarray:
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)


def square_room(side: float = 4.0, robot_radius: float = 0.25, origin=(0.0, 0.0)) -> World:
    ox, oy = origin
    return World(rectangle(ox, oy, ox + side, oy + side), (), robot_radius)


def office_world(robot_radius: float = 0.25) -> World:
    """16 m x 6 m floor split into three rooms by walls with 1 m doors,
    a table (four legs) in the middle room and a cabinet in the east room."""
    t = 0.05  # half wall thickness
    obstacles = [
        # west wall, door at y in [2.3, 3.3]
        rectangle(5 - t, 0.0, 5 + t, 2.3),
        rectangle(5 - t, 3.3, 5 + t, 6.0),
        # east wall, door at y in [4.0, 5.0]
        rectangle(11 - t, 0.0, 11 + t, 4.0),
        rectangle(11 - t, 5.0, 11 + t, 6.0),
        # partial wall sticking into the west room
        rectangle(0.0, 4.0 - t, 2.5, 4.0 + t),
        # table legs
        rectangle(7.4, 1.4, 7.5, 1.5),
        rectangle(8.6, 1.4, 8.7, 1.5),
        rectangle(7.4, 2.4, 7.5, 2.5),
        rectangle(8.6, 2.4, 8.7, 2.5),
        # cabinet
        rectangle(13.0, 2.0, 14.0, 3.0),
    ]
    return World(rectangle(0.0, 0.0, 16.0, 6.0), tuple(obstacles), robot_radius)


#: hand-placed key scan positions covering the office floor
OFFICE_SCAN_CENTERS = (
    (1.2, 1.2), (3.5, 1.5), (1.2, 3.0), (3.5, 3.0), (1.2, 5.0), (3.5, 5.0),
    (5.0, 2.8),
    (6.3, 1.0), (6.5, 2.8), (6.3, 5.0), (8.0, 0.7), (8.0, 2.0), (8.0, 3.6), (8.5, 5.0), (9.8, 1.2), (9.8, 3.0),
    (9.8, 4.5),
    (11.0, 4.5),
    (12.2, 4.6), (12.2, 2.5), (12.2, 0.9), (14.0, 0.9), (15.0, 2.5), (14.0, 4.6), (15.2, 5.2),
)


def loop_world(robot_radius: float = 0.25) -> World:
    """10 m x 7 m outer wall around a 7 m x 4 m block: a 1.5 m wide ring corridor."""
    return World(rectangle(0.0, 0.0, 10.0, 7.0), (rectangle(1.5, 1.5, 8.5, 5.5),), robot_radius)


LOOP_START = (0.75, 3.5)
