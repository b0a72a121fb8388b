from utils.cache import CacheManager, clear_cache, get_cache_stats, global_cache


def test_get_and_set() -> None:
    cache = CacheManager()
    assert cache.get('missing') is None
    cache.set('key', 42)
    assert cache.get('key') == 42
    stats = cache.get_stats()
    assert (stats['hits'], stats['misses'], stats['entries']) == (1, 1, 1)
    assert stats['hit_rate_percent'] == 50.0


def test_least_recently_used_entry_is_evicted() -> None:
    cache = CacheManager(max_entries=2)
    cache.set('a', 1)
    cache.set('b', 2)
    cache.get('a')
    cache.set('c', 3)
    assert cache.get('b') is None
    assert cache.get('a') == 1
    assert cache.get_stats()['evictions'] == 1


def test_delete_and_clear() -> None:
    cache = CacheManager()
    cache.set('a', 1)
    assert cache.delete('a')
    assert not cache.delete('a')
    cache.set('b', 2)
    cache.clear()
    assert cache.get_stats()['entries'] == 0


def test_cached_function_runs_once_per_argument() -> None:
    cache = CacheManager()
    calls = []

    @cache.cached_function(key_prefix='test.')
    def square(n):
        calls.append(n)
        return n * n

    assert square(3) == 9
    assert square(3) == 9
    assert square(4) == 16
    assert calls == [3, 4]


def test_global_cache_helpers(fresh_cache) -> None:
    global_cache.set('x', 'y')
    assert get_cache_stats()['entries'] == 1
    clear_cache()
    assert get_cache_stats()['entries'] == 0
