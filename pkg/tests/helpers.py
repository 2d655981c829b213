from datetime import date, timedelta

from hypothesis import strategies as st

from fireseverity.ingest import FireEvent


def make_event(day=date(2019, 12, 1), confidence=50.0, frp=10.0, scan=1.0, track=1.0,
               brightness=330.0, lat=-33.0, lon=150.0, minutes=0):
    return FireEvent(lat, lon, day, minutes, brightness, scan, track, confidence, frp)


positive = st.floats(0.01, 1e3, allow_nan=False, allow_infinity=False)

events = st.builds(
    make_event,
    day=st.integers(0, 12 * 366).map(lambda d: date(2012, 1, 1) + timedelta(days=d)),
    confidence=st.integers(0, 100).map(float),
    frp=st.floats(0.0, 5e3, allow_nan=False),
    scan=st.floats(1.0, 4.8, allow_nan=False),
    track=st.floats(1.0, 2.0, allow_nan=False),
    brightness=st.floats(280.0, 500.0, allow_nan=False),
    lat=st.floats(-44.0, -10.0, allow_nan=False),
    lon=st.floats(113.0, 154.0, allow_nan=False),
    minutes=st.integers(0, 1439),
)
