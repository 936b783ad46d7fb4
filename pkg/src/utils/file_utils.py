"""
File handling utilities for run outputs
"""
import logging
from pathlib import Path

logger = logging.getLogger(__name__)


def create_directory(directory: Path) -> Path:
    """Create directory if it doesn't exist"""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        logger.error(f"Error creating directory {directory}: {e}")
        raise
    return directory


def write_text_file(file_path: Path, content: str, encoding: str = 'utf-8') -> Path:
    """Write text with LF line endings, creating parent directories"""
    file_path = Path(file_path)
    create_directory(file_path.parent)
    try:
        with open(file_path, 'w', encoding=encoding, newline='\n') as f:
            f.write(content)
    except OSError as e:
        logger.error(f"Error writing file {file_path}: {e}")
        raise
    logger.debug(f"Wrote {file_path}")
    return file_path
