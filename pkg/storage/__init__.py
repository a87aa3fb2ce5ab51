from .codebook_cache import CodebookCache, get_cache, write_codebook, read_codebook

__all__ = ["CodebookCache", "get_cache", "write_codebook", "read_codebook"]
