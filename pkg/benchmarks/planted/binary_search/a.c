/* classic midpoint probe over a sorted span */
int binary_search(int *arr, int len, int key)
{
    int lo = 0;
    int hi = len - 1;
    while (lo <= hi) {
        int mid = lo + (hi - lo) / 2;
        if (arr[mid] == key)
            return mid;
        if (arr[mid] < key)
            lo = mid + 1;
        else
            hi = mid - 1;
    }
    return -1;
}
