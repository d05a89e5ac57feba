"""Essential-state evaluation of mobile UI task-automation traces."""

__version__ = "0.1.0"
