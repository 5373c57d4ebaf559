/* recursive split search, -1 when missing */
int findSorted(int *a, int lo, int hi, int key)
{
    int mid;
    if (lo > hi)
        return -1;
    mid = (lo + hi) / 2;
    if (a[mid] == key)
        return mid;
    if (a[mid] > key)
        return findSorted(a, lo, mid - 1, key);
    return findSorted(a, mid + 1, hi, key);
}
