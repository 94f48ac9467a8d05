from .correspondences import CorrespondenceSet, ImageInfo
from .geometry import CameraMatrix, CameraRole, Epipoles

__all__ = ["CameraMatrix", "CameraRole", "CorrespondenceSet", "Epipoles", "ImageInfo"]
