void insertSorted(int items[], int count)
{
    int pos = 1;
    while (pos < count) {
        int cur = items[pos];
        int scan = pos;
        while (scan > 0 && items[scan - 1] > cur) {
            items[scan] = items[scan - 1];
            scan--;
        }
        items[scan] = cur;
        pos++;
    }
}
